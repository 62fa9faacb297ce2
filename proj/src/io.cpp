#include "covmax/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace covmax::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

std::string at_path(const std::string& path) { return path.empty() ? "/" : path; }

void expect_object(const Json& v, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, _] : v.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw SchemaError(child(path, key), "unknown key");
  }
}

const Json& require(const Json& obj, const std::string& path, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw SchemaError(child(path, key), "required key is missing");
  return *it;
}

const Json* optional_key(const Json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(path, "expected a finite number");
  return d;
}

std::uint64_t as_unsigned(const Json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw SchemaError(path, "expected a non-negative integer");
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const Json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], child(path, k)));
  return out;
}

Eigen::MatrixXd as_matrix(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a non-empty array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  Eigen::MatrixXd out;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> row = as_number_array(v[r], child(path, r));
    if (r == 0) {
      cols = row.size();
      if (cols == 0) throw SchemaError(child(path, r), "rows must be non-empty");
      out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw SchemaError(child(path, r), "row has " + std::to_string(row.size()) + " entries, expected " +
                                            std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return out;
}

/// Re-raises library argument errors at the JSON location that caused them.
template <class F>
auto at(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

process::InnovationDist parse_innovations(const Json& v, const std::string& path) {
  expect_object(v, path, {"dist", "df"});
  const std::string dist = as_string(require(v, path, "dist"), child(path, "dist"));
  if (dist != "student_t" && optional_key(v, "df") != nullptr) {
    throw SchemaError(child(path, "df"), "df only applies to student_t");
  }
  if (dist == "normal") return process::InnovationDist::normal();
  if (dist == "uniform") return process::InnovationDist::uniform();
  if (dist == "rademacher") return process::InnovationDist::rademacher();
  if (dist == "student_t") {
    const double df = as_number(require(v, path, "df"), child(path, "df"));
    return at(child(path, "df"), [&] { return process::InnovationDist::student_t(df); });
  }
  throw SchemaError(child(path, "dist"), "unknown innovation distribution '" + dist + "'");
}

std::vector<double> parse_stationary_coeffs(const Json& doc, const std::string& path) {
  const Json* coeffs = optional_key(doc, "coeffs");
  const Json* lm = optional_key(doc, "long_memory");
  const Json* ar = optional_key(doc, "ar1");
  if ((coeffs != nullptr) + (lm != nullptr) + (ar != nullptr) != 1) {
    throw SchemaError(path, "stationary_linear needs exactly one of coeffs, long_memory, ar1");
  }
  if (coeffs != nullptr) return as_number_array(*coeffs, child(path, "coeffs"));
  if (lm != nullptr) {
    const std::string p = child(path, "long_memory");
    expect_object(*lm, p, {"beta", "J", "variant"});
    const auto lag = static_cast<std::size_t>(as_unsigned(require(*lm, p, "J"), child(p, "J")));
    auto variant = process::LongMemoryVariant::PowerLaw;
    if (const Json* var = optional_key(*lm, "variant")) {
      const std::string name = as_string(*var, child(p, "variant"));
      if (name == "boundary_log") {
        variant = process::LongMemoryVariant::BoundaryLog;
      } else if (name != "power_law") {
        throw SchemaError(child(p, "variant"), "expected power_law or boundary_log");
      }
    }
    double beta = 1.0;
    if (variant == process::LongMemoryVariant::PowerLaw) beta = as_number(require(*lm, p, "beta"), child(p, "beta"));
    return at(p, [&] { return process::long_memory_coeffs(beta, lag, variant); });
  }
  const std::string p = child(path, "ar1");
  expect_object(*ar, p, {"phi", "J"});
  const double phi = as_number(require(*ar, p, "phi"), child(p, "phi"));
  const auto lag = static_cast<std::size_t>(as_unsigned(require(*ar, p, "J"), child(p, "J")));
  return at(p, [&] { return process::ar1_coeffs(phi, lag); });
}

}  // namespace

SchemaError::SchemaError(std::string path, const std::string& what)
    : Error("schema violation at " + at_path(path) + ": " + what), path_(at_path(path)) {}

Eigen::MatrixXd read_matrix_csv(std::istream& in, std::string_view source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto cells = split_cells(view);
    std::vector<double> row;
    row.reserve(cells.size());
    std::optional<std::size_t> bad;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) {
        if (!bad) bad = c;
        continue;
      }
      row.push_back(*v);
    }
    const bool header = first_content && bad.has_value();
    if (first_content) width = cells.size();
    first_content = false;
    if (header) continue;
    const std::string where = std::string(source) + ": row " + std::to_string(line_no);
    if (bad) {
      throw CsvError(where + ", column " + std::to_string(*bad + 1) + ": cannot parse '" +
                     std::string(trim(cells[*bad])) + "' as a number");
    }
    if (cells.size() != width) {
      throw CsvError(where + ": expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) {
        throw CsvError(where + ", column " + std::to_string(c + 1) + ": value is not finite");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(std::string(source) + ": no data rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  return read_matrix_csv(in, file.string());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_number(values(r, c));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& values) {
  std::ostringstream text;
  write_matrix_csv(text, values);
  write_text(file, text.str());
}

namespace {

void dump_into(std::string& out, const Json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_number(d) : "null";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) out += ',';
        newline(depth + 1);
        dump_into(out, v[k], indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, item, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& doc, int indent) {
  std::string out;
  dump_into(out, doc, indent, 0);
  out += '\n';
  return out;
}

Json read_json(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", file.string() + " is not valid JSON (" + e.what() + ")");
  }
}

void write_text(const std::filesystem::path& file, std::string_view text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
  if (!out) throw Error("failed writing " + file.string());
}

ProcessDocument parse_process_spec(const Json& doc, const std::string& path) {
  expect_object(doc, path,
                {"type", "innovations", "coeffs", "long_memory", "ar1", "f", "T", "n", "m", "seed", "column_scale"});
  ProcessDocument out;
  const std::string type = as_string(require(doc, path, "type"), child(path, "type"));
  const process::InnovationDist dist = parse_innovations(require(doc, path, "innovations"), child(path, "innovations"));

  const auto forbid = [&](std::initializer_list<std::string_view> keys) {
    for (std::string_view k : keys)
      if (optional_key(doc, k) != nullptr) throw SchemaError(child(path, k), "not allowed for type " + type);
  };

  if (const Json* v = optional_key(doc, "n")) out.n = as_unsigned(*v, child(path, "n"));
  if (const Json* v = optional_key(doc, "m")) out.m = as_unsigned(*v, child(path, "m"));
  if (const Json* v = optional_key(doc, "seed")) out.seed = as_unsigned(*v, child(path, "seed"));

  if (type == "iid") {
    forbid({"coeffs", "long_memory", "ar1", "f", "T"});
    out.generator.model = mc::IidModel{dist};
  } else if (type == "stationary_linear") {
    forbid({"f", "T"});
    std::vector<double> coeffs = parse_stationary_coeffs(doc, path);
    out.generator.model = at(path, [&] { return mc::StationaryModel{process::StationaryLinearSpec(coeffs, dist)}; });
  } else if (type == "nonstationary_linear") {
    forbid({"coeffs", "long_memory", "ar1"});
    Eigen::MatrixXd f = as_matrix(require(doc, path, "f"), child(path, "f"));
    const auto half = static_cast<std::size_t>(as_unsigned(require(doc, path, "T"), child(path, "T")));
    if (static_cast<std::size_t>(f.cols()) != 2 * half + 1) {
      throw SchemaError(child(path, "f"), "each row needs 2T+1 = " + std::to_string(2 * half + 1) + " entries");
    }
    if (out.m && *out.m != static_cast<std::size_t>(f.rows())) {
      throw SchemaError(child(path, "m"), "m disagrees with the number of rows of f");
    }
    out.m = static_cast<std::size_t>(f.rows());
    out.generator.model =
        at(child(path, "f"), [&] { return mc::NonstationaryModel{process::NonstationaryLinearSpec(f, half, dist)}; });
  } else {
    throw SchemaError(child(path, "type"), "expected iid, stationary_linear or nonstationary_linear");
  }

  if (const Json* cs = optional_key(doc, "column_scale")) {
    const std::string p = child(path, "column_scale");
    if (!cs->is_array()) throw SchemaError(p, "expected an array");
    for (std::size_t k = 0; k < cs->size(); ++k) {
      const std::string q = child(p, k);
      expect_object((*cs)[k], q, {"column", "factor"});
      const auto column = as_unsigned(require((*cs)[k], q, "column"), child(q, "column"));
      if (column < 1) throw SchemaError(child(q, "column"), "columns are numbered from 1");
      if (out.m && column > *out.m) throw SchemaError(child(q, "column"), "column beyond m");
      const double factor = as_number(require((*cs)[k], q, "factor"), child(q, "factor"));
      out.generator.column_scales.push_back({static_cast<std::size_t>(column - 1), factor});
    }
  }
  return out;
}

std::optional<core::Normalization> parse_normalization(std::string_view name) {
  if (name == "default" || name.empty()) return std::nullopt;
  if (name == "theorem") return core::Normalization::TheoremConstants;
  if (name == "cardinality") return core::Normalization::CardinalityConstants;
  throw InvalidArgument("unknown normalization '" + std::string(name) + "' (expected theorem or cardinality)");
}

mc::TestKind parse_test_kind(std::string_view name) {
  if (name == "independence") return mc::TestKind::Independence;
  if (name == "identity") return mc::TestKind::Identity;
  if (name == "stationarity") return mc::TestKind::Stationarity;
  if (name == "banded") return mc::TestKind::Bandedness;
  if (name == "taper") return mc::TestKind::Taper;
  if (name == "custom") return mc::TestKind::Custom;
  throw InvalidArgument("unknown test '" + std::string(name) + "'");
}

std::string_view to_string(mc::TestKind kind) noexcept {
  switch (kind) {
    case mc::TestKind::Independence: return "independence";
    case mc::TestKind::Identity: return "identity";
    case mc::TestKind::Stationarity: return "stationarity";
    case mc::TestKind::Bandedness: return "banded";
    case mc::TestKind::Taper: return "taper";
    case mc::TestKind::Custom: return "custom";
  }
  return "unknown";
}

mc::StudyConfig parse_study_config(const Json& doc, std::optional<std::uint64_t> seed_override) {
  const std::string root;
  expect_object(doc, root, {"generator", "test", "replications", "n", "m", "master_seed", "nominal_levels", "sweep"});
  mc::StudyConfig cfg;
  const ProcessDocument gen = parse_process_spec(require(doc, root, "generator"), "/generator");
  cfg.generator = gen.generator;

  const std::string tp = "/test";
  const Json& test = require(doc, root, "test");
  expect_object(test, tp, {"kind", "band", "sigma0", "normalization"});
  const std::string kind = as_string(require(test, tp, "kind"), child(tp, "kind"));
  cfg.test.kind = at(child(tp, "kind"), [&] { return parse_test_kind(kind); });
  if (const Json* b = optional_key(test, "band")) cfg.test.band = as_unsigned(*b, child(tp, "band"));
  if ((cfg.test.kind == mc::TestKind::Bandedness || cfg.test.kind == mc::TestKind::Taper) &&
      optional_key(test, "band") == nullptr) {
    throw SchemaError(child(tp, "band"), "required for banded and taper tests");
  }
  if (const Json* s = optional_key(test, "sigma0")) {
    if (cfg.test.kind != mc::TestKind::Custom) throw SchemaError(child(tp, "sigma0"), "only used by the custom test");
    if (s->is_string()) {
      if (s->get<std::string>() != "truth") throw SchemaError(child(tp, "sigma0"), "expected \"truth\" or a matrix");
      cfg.test.sigma0_from_generator = true;
    } else {
      cfg.test.sigma0 = as_matrix(*s, child(tp, "sigma0"));
    }
  } else if (cfg.test.kind == mc::TestKind::Custom) {
    throw SchemaError(child(tp, "sigma0"), "required for the custom test");
  }
  if (const Json* nm = optional_key(test, "normalization")) {
    const std::string name = as_string(*nm, child(tp, "normalization"));
    cfg.test.normalization = at(child(tp, "normalization"), [&] { return parse_normalization(name); });
  }

  if (const Json* v = optional_key(doc, "replications")) cfg.replications = as_unsigned(*v, "/replications");
  if (const Json* v = optional_key(doc, "n")) {
    cfg.n = as_unsigned(*v, "/n");
  } else if (gen.n) {
    cfg.n = *gen.n;
  }
  if (const Json* v = optional_key(doc, "m")) {
    cfg.m = as_unsigned(*v, "/m");
  } else if (gen.m) {
    cfg.m = *gen.m;
  }
  if (const Json* v = optional_key(doc, "nominal_levels")) cfg.nominal_levels = as_number_array(*v, "/nominal_levels");
  if (seed_override) {
    cfg.master_seed = *seed_override;
  } else if (const Json* v = optional_key(doc, "master_seed")) {
    cfg.master_seed = as_unsigned(*v, "/master_seed");
  } else {
    throw SchemaError("/master_seed", "no seed given; pass --seed or set master_seed");
  }
  at(root, [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

std::vector<mc::StudyConfig> parse_sweep(const Json& doc, const mc::StudyConfig& base) {
  std::vector<mc::StudyConfig> out;
  const Json* sweep = optional_key(doc, "sweep");
  if (sweep == nullptr) return out;
  if (!sweep->is_array() || sweep->size() < 2) throw SchemaError("/sweep", "expected an array of at least two scales");
  for (std::size_t k = 0; k < sweep->size(); ++k) {
    const std::string p = child(std::string("/sweep"), k);
    const Json& row = (*sweep)[k];
    expect_object(row, p, {"n", "m", "replications"});
    mc::StudyConfig cfg = base;
    cfg.n = as_unsigned(require(row, p, "n"), child(p, "n"));
    cfg.m = as_unsigned(require(row, p, "m"), child(p, "m"));
    if (const Json* r = optional_key(row, "replications")) cfg.replications = as_unsigned(*r, child(p, "replications"));
    at(p, [&] {
      cfg.validate();
      return 0;
    });
    out.push_back(std::move(cfg));
  }
  return out;
}

Json to_json(const core::TestResult& r, double alpha) {
  Json j;
  j["statistic"] = r.statistic;
  j["normalized"] = r.normalized;
  j["p_value"] = r.p_value;
  j["argmax"] = Json::array({r.argmax.i + 1, r.argmax.j + 1});
  j["alpha"] = alpha;
  j["reject"] = r.rejects(alpha);
  j["cardinality"] = r.cardinality;
  j["normalization"] = std::string(core::to_string(r.normalization));
  j["index_set"] = std::string(to_string(r.index_kind));
  j["n"] = r.n;
  j["m"] = r.m;
  return j;
}

Json to_json(const mc::StudySummary& s, const mc::StudyConfig& cfg) {
  Json j;
  j["test"] = std::string(to_string(cfg.test.kind));
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["replications"] = s.replications;
  j["master_seed"] = cfg.master_seed;
  j["failures"] = s.failures;
  Json rates = Json::array();
  for (const auto& [alpha, rate] : s.rejection_rates) rates.push_back({{"alpha", alpha}, {"rate", rate}});
  j["rejection_rates"] = std::move(rates);
  j["ks_to_gumbel"] = s.ks_to_gumbel;
  j["statistics"] = s.statistics;
  j["y_values"] = s.y_values;
  j["p_values"] = s.p_values;
  return j;
}

Json to_json(const mc::SweepTable& t) {
  Json rows = Json::array();
  for (const mc::SweepRow& r : t.rows) {
    Json rates = Json::array();
    for (const auto& [alpha, rate] : r.rejection_rates) rates.push_back({{"alpha", alpha}, {"rate", rate}});
    rows.push_back({{"n", r.n},
                    {"m", r.m},
                    {"replications", r.replications},
                    {"ks_to_gumbel", r.ks_to_gumbel},
                    {"rejection_rates", std::move(rates)},
                    {"non_improvement", r.non_improvement}});
  }
  return Json{{"rows", std::move(rows)}, {"any_non_improvement", t.any_non_improvement()}};
}

Json to_json(const diag::DependenceReport& r) {
  Json j;
  j["m"] = r.m;
  j["cardinality"] = r.cardinality;
  j["kappa4"] = r.kappa4;
  j["tau_min"] = r.tau_min;
  j["gamma_max"] = r.gamma_max;
  j["corr_max_pairs"] = r.corr_max_pairs;
  j["cov_sq_sum"] = r.cov_sq_sum;
  j["b_grid"] = r.b_grid;
  j["gamma_b"] = r.gamma_b;
  j["gamma_b_log_b"] = r.gamma_b_log_b;
  j["gamma_b_nonincreasing"] = r.gamma_b_nonincreasing;
  j["t_grid"] = r.t_grid;
  j["g_counts"] = r.g_counts;
  j["g_counts_nonincreasing"] = r.g_counts_nonincreasing;
  return j;
}

}  // namespace covmax::io
