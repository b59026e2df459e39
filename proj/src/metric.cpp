#include "flagein/metric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace flagein {

double Metric::value(int i, int j) const {
  const int m = n + 1;
  if (i > j) std::swap(i, j);
  if (i < 1 || j > m || i == j) {
    throw std::out_of_range("lambda index (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range for n=" + std::to_string(n));
  }
  return lambda[(i - 1) * m - i * (i - 1) / 2 + (j - i - 1)];
}

void Metric::validate() const {
  if (n < 1) throw std::invalid_argument("metric rank must be >= 1");
  const std::size_t expected = static_cast<std::size_t>(n) * (n + 1) / 2;
  if (lambda.size() != expected) {
    throw std::invalid_argument("metric for n=" + std::to_string(n) + " needs " +
                                std::to_string(expected) + " coefficients, got " +
                                std::to_string(lambda.size()));
  }
  for (double v : lambda) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("metric coefficients must be positive and finite");
    }
  }
}

}  // namespace flagein
