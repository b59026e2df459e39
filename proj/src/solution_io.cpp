#include "flagein/solution_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flagein/curvature.hpp"

namespace flagein {

namespace {

// λ columns carry the 5-decimal rounded dedup values verbatim.
std::string format_lambda(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.5f", v);
  return buf;
}

// Derived quantities: 9 significant digits, fixed notation with trailing
// zeros (7 -> "7.00000000", 12.000033 -> "12.0000330"); values below 1e-3
// (residual norms) switch to scientific so they stay readable.
std::string format_derived(double v) {
  if (v == 0.0) return "0.00000000";
  const double av = std::abs(v);
  char buf[64];
  if (av < 1e-3) {
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
  }
  int digits = std::max(1, static_cast<int>(std::floor(std::log10(av))) + 1);
  for (int pass = 0; pass < 2; ++pass) {
    const int decimals = std::max(0, 9 - digits);
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string_view s(buf);
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    const int int_digits = static_cast<int>(s.find('.') == std::string_view::npos
                                                ? s.size()
                                                : s.find('.'));
    if (int_digits == digits) break;
    digits = int_digits;  // rounding crossed a power of ten
  }
  return buf;
}

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& field, const std::string& context) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw ParseError(context + ": cannot parse number '" + field + "'");
  }
  if (pos != field.size()) {
    throw ParseError(context + ": trailing characters in number '" + field + "'");
  }
  return v;
}

[[noreturn]] void column_count_error(const std::string& context, const std::string& line,
                                     std::size_t got, std::size_t expected) {
  std::string msg = context + ": expected " + std::to_string(expected) +
                    " columns, got " + std::to_string(got);
  if (got > expected && line.find('.') == std::string::npos) {
    msg += " (the row looks comma-decimal formatted; convert decimal commas to dots)";
  }
  throw ParseError(msg);
}

std::vector<std::string> lambda_column_names(int n) {
  const FlagManifold manifold(n);
  std::vector<std::string> names;
  names.reserve(manifold.root_count());
  for (const RootPair& r : manifold.roots()) {
    names.push_back("l_" + std::to_string(r.i) + "_" + std::to_string(r.j));
  }
  return names;
}

void check_lambda_row(const std::vector<double>& lambda, const std::string& context) {
  for (double v : lambda) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ParseError(context + ": lambda column must be positive, got " +
                       std::to_string(v));
    }
  }
  if (std::abs(lambda[0] - 1.0) > 1e-12) {
    throw ParseError(context + ": l_1_2 column must be identically 1");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string meta_line(const SolveMeta& meta) {
  std::ostringstream os;
  os << "# n=" << meta.n << " trials=" << meta.trials << " seed=" << meta.seed
     << " box_max=" << format_g9(meta.box_max)
     << " residual_tolerance=" << format_g9(meta.residual_tolerance)
     << " positivity_threshold=" << format_g9(meta.positivity_threshold)
     << " rounding_decimals=" << meta.rounding_decimals;
  return os.str();
}

void parse_meta_tokens(const std::string& line, SolveMeta& meta) {
  std::stringstream ss(line.substr(1));
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "n") meta.n = std::stoi(value);
    else if (key == "trials") meta.trials = std::stoll(value);
    else if (key == "seed") meta.seed = std::stoull(value);
    else if (key == "box_max") meta.box_max = std::stod(value);
    else if (key == "residual_tolerance") meta.residual_tolerance = std::stod(value);
    else if (key == "positivity_threshold") meta.positivity_threshold = std::stod(value);
    else if (key == "rounding_decimals") meta.rounding_decimals = std::stoi(value);
  }
}

std::string solutions_csv(const SolutionFile& file) {
  std::ostringstream os;
  os << "# flagein-solutions v" << file.meta.version << "\n";
  os << meta_line(file.meta) << "\n";
  for (const auto& name : lambda_column_names(file.meta.n)) os << name << ",";
  os << "scalar_curvature,volume_factor,h_invariant,einstein_constant,residual_norm\n";
  for (const auto& rec : file.records) {
    for (double l : rec.lambda) os << format_lambda(l) << ",";
    os << format_derived(rec.scalar_curvature) << ","
       << format_derived(rec.volume_factor) << ","
       << format_derived(rec.h_invariant) << ","
       << (rec.einstein_constant ? format_derived(*rec.einstein_constant) : "") << ","
       << format_derived(rec.residual_norm) << "\n";
  }
  return os.str();
}

nlohmann::ordered_json solutions_json(const SolutionFile& file) {
  nlohmann::ordered_json j;
  j["format"] = "flagein-solutions";
  j["version"] = file.meta.version;
  j["n"] = file.meta.n;
  j["config"] = {{"trials", file.meta.trials},
                 {"seed", file.meta.seed},
                 {"box_max", file.meta.box_max},
                 {"residual_tolerance", file.meta.residual_tolerance},
                 {"positivity_threshold", file.meta.positivity_threshold},
                 {"rounding_decimals", file.meta.rounding_decimals}};
  j["solutions"] = nlohmann::ordered_json::array();
  for (const auto& rec : file.records) {
    nlohmann::ordered_json row;
    row["lambda"] = rec.lambda;
    row["scalar_curvature"] = rec.scalar_curvature;
    row["volume_factor"] = rec.volume_factor;
    row["h_invariant"] = rec.h_invariant;
    if (rec.einstein_constant) {
      row["einstein_constant"] = *rec.einstein_constant;
    } else {
      row["einstein_constant"] = nullptr;
    }
    row["residual_norm"] = rec.residual_norm;
    j["solutions"].push_back(std::move(row));
  }
  return j;
}

SolutionFile read_solutions_csv(const std::filesystem::path& path, std::istream& in) {
  SolutionFile file;
  file.meta.n = 0;
  std::string line;
  int line_no = 0;
  bool saw_header_row = false;
  std::size_t expected_cols = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      if (line.find("n=") != std::string::npos) parse_meta_tokens(line, file.meta);
      continue;
    }
    if (!saw_header_row) {
      if (file.meta.n < 1) {
        throw ParseError(context + ": missing '# n=...' header echo before data");
      }
      const auto names = lambda_column_names(file.meta.n);
      std::string expected;
      for (const auto& nme : names) expected += nme + ",";
      expected += "scalar_curvature,volume_factor,h_invariant,einstein_constant,residual_norm";
      if (line != expected) {
        throw ParseError(context + ": unexpected column header for n=" +
                         std::to_string(file.meta.n));
      }
      expected_cols = names.size() + 5;
      saw_header_row = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != expected_cols) {
      column_count_error(context, line, fields.size(), expected_cols);
    }
    SolutionRecord rec;
    const std::size_t n_lambda = expected_cols - 5;
    rec.lambda.reserve(n_lambda);
    for (std::size_t c = 0; c < n_lambda; ++c) {
      rec.lambda.push_back(parse_double(fields[c], context));
    }
    check_lambda_row(rec.lambda, context);
    rec.scalar_curvature = parse_double(fields[n_lambda], context);
    rec.volume_factor = parse_double(fields[n_lambda + 1], context);
    rec.h_invariant = parse_double(fields[n_lambda + 2], context);
    if (!fields[n_lambda + 3].empty()) {
      rec.einstein_constant = parse_double(fields[n_lambda + 3], context);
    }
    rec.residual_norm = parse_double(fields[n_lambda + 4], context);
    file.records.push_back(std::move(rec));
  }
  if (!saw_header_row) {
    throw ParseError(path.string() + ": no column header found");
  }
  return file;
}

SolutionFile read_solutions_json(const std::filesystem::path& path, std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "flagein-solutions") {
    throw ParseError(path.string() + ": not a flagein solutions file");
  }
  SolutionFile file;
  file.meta.version = j.value("version", 1);
  file.meta.n = j.at("n").get<int>();
  const auto& cfg = j.at("config");
  file.meta.trials = cfg.value("trials", std::int64_t{0});
  file.meta.seed = cfg.value("seed", std::uint64_t{0});
  file.meta.box_max = cfg.value("box_max", 10.0);
  file.meta.residual_tolerance = cfg.value("residual_tolerance", 1e-10);
  file.meta.positivity_threshold = cfg.value("positivity_threshold", 1e-4);
  file.meta.rounding_decimals = cfg.value("rounding_decimals", 5);
  const std::size_t n_lambda = static_cast<std::size_t>(file.meta.n) *
                               (file.meta.n + 1) / 2;
  int row_no = 0;
  for (const auto& row : j.at("solutions")) {
    ++row_no;
    const std::string context = path.string() + ": solution " + std::to_string(row_no);
    SolutionRecord rec;
    rec.lambda = row.at("lambda").get<std::vector<double>>();
    if (rec.lambda.size() != n_lambda) {
      throw ParseError(context + ": lambda must have " + std::to_string(n_lambda) +
                       " entries");
    }
    check_lambda_row(rec.lambda, context);
    rec.scalar_curvature = row.at("scalar_curvature").get<double>();
    rec.volume_factor = row.at("volume_factor").get<double>();
    rec.h_invariant = row.at("h_invariant").get<double>();
    if (!row.at("einstein_constant").is_null()) {
      rec.einstein_constant = row.at("einstein_constant").get<double>();
    }
    rec.residual_norm = row.at("residual_norm").get<double>();
    file.records.push_back(std::move(rec));
  }
  return file;
}

}  // namespace

SolutionRecord make_record(int n, std::span<const double> x, double residual_norm) {
  Metric metric;
  metric.n = n;
  metric.lambda.reserve(x.size() + 1);
  metric.lambda.push_back(1.0);
  metric.lambda.insert(metric.lambda.end(), x.begin(), x.end());
  const CurvatureSummary summary = curvature_summary(metric);
  SolutionRecord rec;
  rec.lambda = metric.lambda;
  rec.scalar_curvature = summary.scalar_curvature;
  rec.volume_factor = summary.volume_factor;
  rec.h_invariant = summary.h_invariant;
  // The trial converged below the solver tolerance; the rounded row keeps
  // the mean Ricci as its Einstein constant even though rounding alone
  // already moves the deviation above the strict Einstein test.
  double mean = 0.0;
  for (double r : summary.ricci) mean += r;
  rec.einstein_constant = mean / static_cast<double>(summary.ricci.size());
  rec.residual_norm = residual_norm;
  return rec;
}

void write_solutions(const SolutionFile& file, const std::filesystem::path& path,
                     SolutionFormat format) {
  for (const auto& rec : file.records) {
    if (rec.lambda.size() != static_cast<std::size_t>(file.meta.n) *
                                 (file.meta.n + 1) / 2) {
      throw std::invalid_argument("record lambda size does not match meta.n");
    }
  }
  if (format == SolutionFormat::Csv) {
    write_text(path, solutions_csv(file));
  } else {
    write_text(path, solutions_json(file).dump(2) + "\n");
  }
}

SolutionFile read_solutions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  // Sniff: JSON files start with '{'.
  int c = in.peek();
  while (c != EOF && std::isspace(c)) {
    in.get();
    c = in.peek();
  }
  if (c == '{') return read_solutions_json(path, in);
  return read_solutions_csv(path, in);
}

std::vector<FixtureRow> read_su5_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<FixtureRow> rows;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string context = path.string() + ":" + std::to_string(line_no);
    if (!saw_header) {
      if (line.rfind("x_1_3,", 0) != 0) {
        throw ParseError(context + ": expected fixture header starting with x_1_3");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != 12) {
      column_count_error(context, line, fields.size(), 12);
    }
    FixtureRow row;
    row.lambda.reserve(10);
    row.lambda.push_back(1.0);  // x_{1,2} = 1 gauge
    for (int c = 0; c < 9; ++c) {
      const double v = parse_double(fields[c], context);
      if (!(v > 0.0)) throw ParseError(context + ": lambda must be positive");
      row.lambda.push_back(v);
    }
    row.scalar_curvature = parse_double(fields[9], context);
    row.volume_factor = parse_double(fields[10], context);
    row.h_invariant = parse_double(fields[11], context);
    rows.push_back(std::move(row));
  }
  if (!saw_header) throw ParseError(path.string() + ": no fixture header found");
  return rows;
}

std::vector<ClassBlock> make_class_blocks(const std::vector<IsometryClass>& classes,
                                          const std::vector<SolutionRecord>& records) {
  std::vector<ClassBlock> blocks;
  blocks.reserve(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ClassBlock block;
    block.class_id = static_cast<int>(c) + 1;
    block.is_kaehler_einstein = classes[c].is_kaehler_einstein;
    block.class_h = classes[c].h_value;
    for (int idx : classes[c].members) {
      block.members.push_back(records.at(static_cast<std::size_t>(idx)));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

namespace {

std::string classes_csv(const std::vector<ClassBlock>& blocks, int n,
                        bool with_comments) {
  std::ostringstream os;
  if (with_comments) {
    os << "# flagein-classes v1\n";
    os << "# n=" << n << " classes=" << blocks.size() << "\n";
  }
  os << "class_id,is_kaehler_einstein,class_h,";
  for (const auto& name : lambda_column_names(n)) os << name << ",";
  os << "scalar_curvature,volume_factor,h_invariant\n";
  char hbuf[64];
  for (const auto& block : blocks) {
    for (const auto& rec : block.members) {
      std::snprintf(hbuf, sizeof(hbuf), "%.9f", block.class_h);
      os << block.class_id << "," << (block.is_kaehler_einstein ? 1 : 0) << ","
         << hbuf << ",";
      for (double l : rec.lambda) os << format_lambda(l) << ",";
      std::snprintf(hbuf, sizeof(hbuf), "%.9f", rec.scalar_curvature);
      os << hbuf << ",";
      std::snprintf(hbuf, sizeof(hbuf), "%.9f", rec.volume_factor);
      os << hbuf << ",";
      std::snprintf(hbuf, sizeof(hbuf), "%.9f", rec.h_invariant);
      os << hbuf << "\n";
    }
  }
  return os.str();
}

}  // namespace

void write_classes(const std::vector<ClassBlock>& blocks, int n,
                   const std::filesystem::path& path) {
  write_text(path, classes_csv(blocks, n, true));
}

std::pair<int, std::vector<ClassBlock>> read_classes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  int n = 0;
  bool saw_header = false;
  std::size_t expected_cols = 0;
  std::vector<ClassBlock> blocks;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      SolveMeta tmp;
      if (line.find("n=") != std::string::npos) {
        parse_meta_tokens(line, tmp);
        if (tmp.n > 0) n = tmp.n;
      }
      continue;
    }
    if (!saw_header) {
      if (n < 1) throw ParseError(context + ": missing '# n=...' before data");
      expected_cols = 3 + static_cast<std::size_t>(n) * (n + 1) / 2 + 3;
      if (line.rfind("class_id,", 0) != 0) {
        throw ParseError(context + ": expected class_id header");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != expected_cols) {
      column_count_error(context, line, fields.size(), expected_cols);
    }
    const int class_id = static_cast<int>(parse_double(fields[0], context));
    const bool is_ke = parse_double(fields[1], context) != 0.0;
    const double class_h = parse_double(fields[2], context);
    SolutionRecord rec;
    const std::size_t n_lambda = expected_cols - 6;
    for (std::size_t c = 0; c < n_lambda; ++c) {
      rec.lambda.push_back(parse_double(fields[3 + c], context));
    }
    check_lambda_row(rec.lambda, context);
    rec.scalar_curvature = parse_double(fields[3 + n_lambda], context);
    rec.volume_factor = parse_double(fields[4 + n_lambda], context);
    rec.h_invariant = parse_double(fields[5 + n_lambda], context);
    if (blocks.empty() || blocks.back().class_id != class_id) {
      ClassBlock block;
      block.class_id = class_id;
      block.is_kaehler_einstein = is_ke;
      block.class_h = class_h;
      blocks.push_back(std::move(block));
    }
    blocks.back().members.push_back(std::move(rec));
  }
  if (!saw_header) throw ParseError(path.string() + ": no class header found");
  return {n, blocks};
}

std::string render_table(const std::vector<ClassBlock>& blocks, int n,
                         TableFormat format) {
  std::vector<const ClassBlock*> ordered;
  ordered.reserve(blocks.size());
  for (const auto& b : blocks) ordered.push_back(&b);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ClassBlock* a, const ClassBlock* b) {
                     return a->class_h < b->class_h;
                   });

  if (format == TableFormat::Csv) {
    std::vector<ClassBlock> sorted;
    sorted.reserve(ordered.size());
    for (const ClassBlock* b : ordered) sorted.push_back(*b);
    return classes_csv(sorted, n, false);
  }

  std::ostringstream os;
  char buf[64];
  const auto names = lambda_column_names(n);
  for (const ClassBlock* block : ordered) {
    std::snprintf(buf, sizeof(buf), "%.9f", block->class_h);
    os << "## Class " << block->class_id << " — H = " << buf;
    if (block->is_kaehler_einstein) os << " (Kähler–Einstein)";
    os << " — " << block->members.size()
       << (block->members.size() == 1 ? " metric\n\n" : " metrics\n\n");
    os << "|";
    for (const auto& name : names) os << " " << name << " |";
    os << " scalar_curvature | volume_factor | h_invariant |\n";
    os << "|";
    for (std::size_t c = 0; c < names.size() + 3; ++c) os << " --- |";
    os << "\n";
    for (const auto& rec : block->members) {
      os << "|";
      for (double l : rec.lambda) os << " " << format_lambda(l) << " |";
      std::snprintf(buf, sizeof(buf), "%.9f", rec.scalar_curvature);
      os << " " << buf << " |";
      std::snprintf(buf, sizeof(buf), "%.9f", rec.volume_factor);
      os << " " << buf << " |";
      std::snprintf(buf, sizeof(buf), "%.9f", rec.h_invariant);
      os << " " << buf << " |\n";
    }
    os << "\n";
  }
  if (ordered.empty()) {
    os << "(no classes)\n";
  }
  return os.str();
}

}  // namespace flagein
