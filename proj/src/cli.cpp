#include "covmax/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covmax/diagnostics.hpp"
#include "covmax/io.hpp"
#include "covmax/mc_harness.hpp"
#include "covmax/structure_tests.hpp"

namespace covmax::cli {

namespace {

using io::Json;

struct TestArgs {
  std::string input;
  std::string null_kind;
  std::optional<std::size_t> band;
  std::optional<double> eta;
  std::string sigma0;
  std::string normalization = "default";
  double alpha = 0.05;
  std::string out;
  bool fail_on_reject = false;
};

struct SimulateArgs {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::string out;
};

struct McArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string csv;
  std::string ecdf;
  std::optional<unsigned> threads;
};

struct DiagnoseArgs {
  std::string spec;
  std::optional<std::size_t> m;
  std::string index = "strict";
  std::size_t band = 0;
  std::vector<std::size_t> b_grid{1, 2, 4, 8, 16};
  std::vector<double> t_grid{0.05, 0.1, 0.2, 0.5};
  std::size_t cap = diag::kDefaultPairCap;
  std::string out;
};

struct TaperArgs {
  std::string input;
  std::optional<std::size_t> band;
  std::optional<double> eta;
  std::string out;
  std::string truth;
  std::string report;
};

void emit(const Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = io::dump_json(doc);
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("COVMAX_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == nullptr || *end != '\0') throw InvalidArgument("COVMAX_THREADS must be a non-negative integer");
    return static_cast<unsigned>(v);
  }
  return 0;
}

int cmd_test(const TestArgs& a, std::ostream& out) {
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InvalidArgument("--alpha must lie in (0, 1)");
  const DataMatrix x(io::read_matrix_csv(std::filesystem::path(a.input)));
  const auto mode = io::parse_normalization(a.normalization);
  const mc::TestKind kind = io::parse_test_kind(a.null_kind);

  core::TestResult result;
  std::optional<structure::TaperAssessment> taper;
  switch (kind) {
    case mc::TestKind::Bandedness:
      if (!a.band) throw InvalidArgument("--null banded needs --band");
      result = structure::test_bandedness(x, *a.band, mode);
      break;
    case mc::TestKind::Taper:
      if (a.band.has_value() == a.eta.has_value()) throw InvalidArgument("--null taper needs exactly one of --band, --eta");
      taper = a.band ? structure::assess_taper(x, structure::TaperSpec(*a.band, x.m()), mode)
                     : structure::assess_taper(x, *a.eta, mode);
      result = taper->result;
      break;
    case mc::TestKind::Custom: {
      if (a.sigma0.empty()) throw InvalidArgument("--null custom needs --sigma0");
      const Eigen::MatrixXd sigma0 = io::read_matrix_csv(std::filesystem::path(a.sigma0));
      mc::TestConfig cfg{kind, 0, sigma0, false, mode};
      result = mc::apply_test(cfg, x);
      break;
    }
    default:
      result = mc::apply_test(mc::TestConfig{kind, 0, std::nullopt, false, mode}, x);
  }

  out << "statistic: " << io::format_number(result.statistic) << '\n'
      << "normalized: " << io::format_number(result.normalized) << '\n'
      << "p-value: " << io::format_number(result.p_value) << '\n'
      << "argmax: (" << result.argmax.i + 1 << ", " << result.argmax.j + 1 << ")\n"
      << "decision at alpha " << a.alpha << ": " << (result.rejects(a.alpha) ? "reject" : "do not reject") << '\n';

  if (!a.out.empty()) {
    Json report = io::to_json(result, a.alpha);
    report["null"] = a.null_kind;
    if (taper) {
      report["bandwidth"] = taper->bandwidth;
      report["bias_scale"] = taper->bias_scale;
      report["caveat"] = taper->caveat;
    }
    io::write_text(a.out, io::dump_json(report));
  }
  return a.fail_on_reject && result.rejects(a.alpha) ? kExitReject : kExitOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const io::ProcessDocument doc = io::parse_process_spec(io::read_json(a.spec));
  const auto seed = a.seed ? a.seed : doc.seed;
  if (!seed) throw InvalidArgument("simulate needs --seed (or a seed in the spec)");
  const auto n = a.n ? a.n : doc.n;
  const auto m = a.m ? a.m : doc.m;
  if (!n || !m) throw InvalidArgument("simulate needs n and m (flags or spec)");
  const DataMatrix x = doc.generator.generate(*n, *m, *seed);
  if (a.out.empty() || a.out == "-") {
    io::write_matrix_csv(out, x.values());
  } else {
    io::write_matrix_csv(std::filesystem::path(a.out), x.values());
  }
  return kExitOk;
}

int cmd_mc(const McArgs& a, std::ostream& out, std::ostream& err) {
  const Json doc = io::read_json(a.config);
  const mc::StudyConfig cfg = io::parse_study_config(doc, a.seed);
  const unsigned threads = resolve_threads(a.threads);
  const std::vector<mc::StudyConfig> sweep = io::parse_sweep(doc, cfg);

  if (!sweep.empty()) {
    if (!a.csv.empty() || !a.ecdf.empty()) throw InvalidArgument("--csv/--ecdf are not available for sweeps");
    const mc::SweepTable table = mc::convergence_sweep(sweep, threads);
    emit(io::to_json(table), a.out, out);
    return kExitOk;
  }

  const mc::StudySummary s = mc::run_study(cfg, threads);
  emit(io::to_json(s, cfg), a.out, out);
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << "replication,y,p\n";
    for (std::size_t r = 0; r < s.replications; ++r) {
      csv << r + 1 << ',' << io::format_number(s.y_values[r]) << ',' << io::format_number(s.p_values[r]) << '\n';
    }
    io::write_text(a.csv, csv.str());
  }
  if (!a.ecdf.empty()) {
    std::ostringstream csv;
    csv << "y,ecdf,gumbel_cdf\n";
    for (const auto& [y, f] : mc::empirical_cdf(s.y_values)) {
      csv << io::format_number(y) << ',' << io::format_number(f) << ',' << io::format_number(core::gumbel_cdf(y))
          << '\n';
    }
    io::write_text(a.ecdf, csv.str());
  }
  err << "runtime_seconds: " << s.runtime_seconds << '\n';
  return kExitOk;
}

process::NonstationaryLinearSpec as_linear(const io::ProcessDocument& doc, std::size_t m) {
  return std::visit(
      [&](const auto& g) -> process::NonstationaryLinearSpec {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, mc::IidModel>) {
          return process::NonstationaryLinearSpec::iid(m, g.innovations);
        } else if constexpr (std::is_same_v<T, mc::StationaryModel>) {
          return process::NonstationaryLinearSpec::from_stationary(g.spec, m);
        } else {
          return g.spec;
        }
      },
      doc.generator.model);
}

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
  const io::ProcessDocument doc = io::parse_process_spec(io::read_json(a.spec));
  if (!doc.generator.column_scales.empty()) throw InvalidArgument("diagnose does not support column_scale");
  const auto m = a.m ? a.m : doc.m;
  if (!m) throw InvalidArgument("diagnose needs m (flag or spec)");
  const process::NonstationaryLinearSpec spec = as_linear(doc, *m);

  PairIndexSet idx = PairIndexSet::strict_pairs(*m);
  if (a.index == "diagonal") {
    idx = PairIndexSet::with_diagonal(*m);
  } else if (a.index == "banded") {
    idx = PairIndexSet::band_exterior(*m, a.band);
  } else if (a.index != "strict") {
    throw InvalidArgument("--index must be strict, diagonal or banded");
  }

  const diag::DependenceReport report = diag::condition_report(spec, idx, a.b_grid, a.t_grid, a.cap);
  Json j = io::to_json(report);
  j["index_set"] = std::string(to_string(idx.kind()));
  j["h_profile"] = diag::h_profile(spec);
  emit(j, a.out, out);
  return kExitOk;
}

double operator_norm(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

int cmd_taper(const TaperArgs& a, std::ostream& out) {
  const DataMatrix x(io::read_matrix_csv(std::filesystem::path(a.input)));
  if (a.band.has_value() == a.eta.has_value()) throw InvalidArgument("taper needs exactly one of --band, --eta");
  const std::size_t band = a.band ? *a.band : structure::choose_bandwidth(x.n(), *a.eta);
  const structure::TaperSpec spec(band, x.m());
  const Eigen::MatrixXd tapered = structure::tapered_estimate(x, spec);
  io::write_matrix_csv(std::filesystem::path(a.out), tapered);

  Json j;
  j["bandwidth"] = band;
  j["n"] = x.n();
  j["m"] = x.m();
  if (!a.truth.empty()) {
    const Eigen::MatrixXd truth = io::read_matrix_csv(std::filesystem::path(a.truth));
    if (truth.rows() != tapered.rows() || truth.cols() != tapered.cols()) {
      throw InvalidArgument("--truth must be " + std::to_string(x.m()) + " x " + std::to_string(x.m()));
    }
    const Eigen::MatrixXd raw = core::sample_covariance(x);
    j["operator_error_tapered"] = operator_norm(tapered - truth);
    j["operator_error_raw"] = operator_norm(raw - truth);
    j["frobenius_error_tapered"] = (tapered - truth).norm();
    j["frobenius_error_raw"] = (raw - truth).norm();
  }
  emit(j, a.report, out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simultaneous max-deviation inference for high-dimensional covariance matrices", "covmax"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "covmax 1.0.0");

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Test a covariance structure on a data CSV");
  test->add_option("--input", ta.input, "Data CSV: rows observations, columns variables")->required();
  test->add_option("--null", ta.null_kind, "Null hypothesis")
      ->required()
      ->check(CLI::IsMember({"independence", "identity", "stationarity", "banded", "taper", "custom"}));
  test->add_option("--band", ta.band, "Band for banded/taper nulls");
  test->add_option("--eta", ta.eta, "Taper smoothness; bandwidth from n^(1/(2 eta + 1))");
  test->add_option("--sigma0", ta.sigma0, "Null covariance CSV for --null custom");
  test->add_option("--normalization", ta.normalization, "Normalization constants")
      ->check(CLI::IsMember({"default", "theorem", "cardinality"}));
  test->add_option("--alpha", ta.alpha, "Significance level")->capture_default_str();
  test->add_option("--out", ta.out, "Write the JSON report here");
  test->add_flag("--fail-on-reject", ta.fail_on_reject, "Exit with code 2 when the null is rejected");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Generate a data CSV from a process spec");
  simulate->add_option("--spec", sa.spec, "Process spec JSON")->required();
  simulate->add_option("--seed", sa.seed, "Random seed (required unless the spec has one)");
  simulate->add_option("--n", sa.n, "Observations (overrides spec)");
  simulate->add_option("--m", sa.m, "Variables (overrides spec)");
  simulate->add_option("--out", sa.out, "Output CSV (stdout when omitted)");

  McArgs ma;
  auto* mcc = app.add_subcommand("mc", "Run a Monte Carlo study");
  mcc->add_option("--config", ma.config, "Study config JSON")->required();
  mcc->add_option("--seed", ma.seed, "Master seed (overrides master_seed)");
  mcc->add_option("--out", ma.out, "Summary JSON (stdout when omitted)");
  mcc->add_option("--csv", ma.csv, "Per-replication CSV of (replication, y, p)");
  mcc->add_option("--ecdf", ma.ecdf, "Empirical CDF points of y against the Gumbel CDF");
  mcc->add_option("--threads", ma.threads, "Worker threads (0 = all cores; default COVMAX_THREADS or all cores)");

  DiagnoseArgs da;
  auto* diagnose = app.add_subcommand("diagnose", "Tabulate dependence conditions of a linear process spec");
  diagnose->add_option("--spec", da.spec, "Process spec JSON")->required();
  diagnose->add_option("--m", da.m, "Dimension (overrides spec)");
  diagnose->add_option("--index", da.index, "Index set")->check(CLI::IsMember({"strict", "diagonal", "banded"}));
  diagnose->add_option("--band", da.band, "Band for --index banded");
  diagnose->add_option("--b-grid", da.b_grid, "Ranks b for gamma(b)")->delimiter(',');
  diagnose->add_option("--t-grid", da.t_grid, "Thresholds t for G(t)")->delimiter(',');
  diagnose->add_option("--cap", da.cap, "Maximum index-set size")->capture_default_str();
  diagnose->add_option("--out", da.out, "Report JSON (stdout when omitted)");

  TaperArgs pa;
  auto* taper = app.add_subcommand("taper", "Tapered covariance estimate of a data CSV");
  taper->add_option("--input", pa.input, "Data CSV")->required();
  taper->add_option("--band", pa.band, "Even bandwidth");
  taper->add_option("--eta", pa.eta, "Choose the bandwidth from n and eta");
  taper->add_option("--out", pa.out, "Tapered matrix CSV")->required();
  taper->add_option("--truth", pa.truth, "True covariance CSV for error reporting");
  taper->add_option("--report", pa.report, "Error report JSON (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*test) return cmd_test(ta, out);
    if (*simulate) return cmd_simulate(sa, out);
    if (*mcc) return cmd_mc(ma, out, err);
    if (*diagnose) return cmd_diagnose(da, out);
    if (*taper) return cmd_taper(pa, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace covmax::cli
