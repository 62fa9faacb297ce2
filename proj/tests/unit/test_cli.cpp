#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "covmax/cli.hpp"
#include "covmax/core_stats.hpp"
#include "covmax/io.hpp"
#include "covmax/structure_tests.hpp"

namespace fs = std::filesystem;
using namespace covmax;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "covmax");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("covmax_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    io::write_text(dir_ / name, text);
    return path(name);
  }

  std::string write_matrix(const std::string& name, const Eigen::MatrixXd& m) const {
    io::write_matrix_csv(dir_ / name, m);
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

Eigen::MatrixXd normal_data(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = z(rng);
  return x;
}

/// Centers and rotates so the sample covariance is exactly the identity (up to rounding).
Eigen::MatrixXd whiten(Eigen::MatrixXd x) {
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd s = x.transpose() * x / static_cast<double>(x.rows());
  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  return llt.matrixL().solve(x.transpose()).transpose();
}

const char* kIidSpec = R"({"type":"iid","innovations":{"dist":"normal"},"n":200,"m":6})";

}  // namespace

TEST_F(CliTest, IdentityOnWhitenedDataDoesNotReject) {
  const auto input = write_matrix("x.csv", whiten(normal_data(300, 5, 1)));
  const auto r = invoke({"test", "--input", input, "--null", "identity", "--out", path("r.json"), "--fail-on-reject"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = io::read_json(path("r.json"));
  EXPECT_LT(j["statistic"].get<double>(), 1e-10);
  // With a zero statistic the p-value is the survival function at the offset alone.
  const double y0 = core::normalization_offset(15, core::Normalization::TheoremConstants, 5);
  EXPECT_NEAR(j["p_value"].get<double>(), core::gumbel_survival(y0), 1e-9);
  EXPECT_NE(r.out.find("do not reject"), std::string::npos);
}

TEST_F(CliTest, BandZeroMatchesIndependence) {
  const auto input = write_matrix("x.csv", normal_data(120, 6, 2));
  ASSERT_EQ(invoke({"test", "--input", input, "--null", "banded", "--band", "0", "--out", path("b.json")}).code, 0);
  ASSERT_EQ(invoke({"test", "--input", input, "--null", "independence", "--out", path("i.json")}).code, 0);
  const auto b = io::read_json(path("b.json"));
  const auto i = io::read_json(path("i.json"));
  EXPECT_EQ(b["statistic"], i["statistic"]);
  EXPECT_EQ(b["argmax"], i["argmax"]);
  EXPECT_EQ(b["cardinality"], i["cardinality"]);
}

TEST_F(CliTest, CustomNullEqualToSampleCovarianceGivesZero) {
  const Eigen::MatrixXd x = normal_data(100, 4, 3);
  const auto input = write_matrix("x.csv", x);
  const auto sigma = write_matrix("s.csv", core::sample_covariance(DataMatrix(x)));
  const auto r = invoke({"test", "--input", input, "--null", "custom", "--sigma0", sigma, "--out", path("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(io::read_json(path("c.json"))["statistic"].get<double>(), 1e-12);
}

TEST_F(CliTest, RejectionExitCode) {
  Eigen::MatrixXd x = normal_data(400, 5, 4);
  x.col(1) = x.col(0) + 0.1 * x.col(1);
  const auto input = write_matrix("x.csv", x);
  EXPECT_EQ(invoke({"test", "--input", input, "--null", "independence"}).code, cli::kExitOk);
  EXPECT_EQ(invoke({"test", "--input", input, "--null", "independence", "--fail-on-reject"}).code, cli::kExitReject);
}

TEST_F(CliTest, ArgmaxPrintedOneBased) {
  Eigen::MatrixXd x = normal_data(400, 5, 5);
  x.col(3) = x.col(2) + 0.1 * x.col(3);
  const auto r = invoke({"test", "--input", write_matrix("x.csv", x), "--null", "independence"});
  EXPECT_NE(r.out.find("argmax: (3, 4)"), std::string::npos) << r.out;
}

TEST_F(CliTest, ArgumentErrors) {
  const auto input = write_matrix("x.csv", normal_data(50, 4, 6));
  EXPECT_EQ(invoke({"test", "--input", input, "--null", "banded"}).code, cli::kExitError);
  EXPECT_EQ(invoke({"test", "--input", input, "--null", "custom"}).code, cli::kExitError);
  EXPECT_EQ(invoke({"test", "--input", input, "--null", "nonsense"}).code, cli::kExitError);
  EXPECT_EQ(invoke({"test", "--input", path("missing.csv")}).code, cli::kExitError);
  EXPECT_EQ(invoke({"test"}).code, cli::kExitError);
  EXPECT_EQ(invoke({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, MalformedCsvIsReportedWithLocation) {
  const auto input = write("bad.csv", "1,2,3\n4,x,6\n7,8,9\n");
  const auto r = invoke({"test", "--input", input, "--null", "independence"});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("row 2, column 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto spec = write("spec.json", kIidSpec);
  ASSERT_EQ(invoke({"simulate", "--spec", spec, "--seed", "9", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(invoke({"simulate", "--spec", spec, "--seed", "9", "--out", path("b.csv")}).code, 0);
  ASSERT_EQ(invoke({"simulate", "--spec", spec, "--seed", "10", "--out", path("c.csv")}).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
  const auto x = io::read_matrix_csv(fs::path(path("a.csv")));
  EXPECT_EQ(x.rows(), 200);
  EXPECT_EQ(x.cols(), 6);
  const auto stdout_run = invoke({"simulate", "--spec", spec, "--seed", "9", "--n", "5", "--m", "3"});
  EXPECT_EQ(std::count(stdout_run.out.begin(), stdout_run.out.end(), '\n'), 5);
}

TEST_F(CliTest, SimulateNeedsSeed) {
  const auto spec = write("spec.json", kIidSpec);
  EXPECT_EQ(invoke({"simulate", "--spec", spec, "--out", path("a.csv")}).code, cli::kExitError);
}

TEST_F(CliTest, SchemaErrorsNameThePath) {
  const auto spec = write("spec.json", R"({"type":"iid","innovations":{"dist":"normal","df":9}})");
  const auto r = invoke({"simulate", "--spec", spec, "--seed", "1", "--n", "10", "--m", "3"});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("/innovations/df"), std::string::npos) << r.err;
}

TEST_F(CliTest, TaperWithWideBandReturnsSampleCovariance) {
  const Eigen::MatrixXd x = normal_data(60, 5, 7);
  const auto input = write_matrix("x.csv", x);
  ASSERT_EQ(invoke({"taper", "--input", input, "--band", "8", "--out", path("t.csv"), "--report", path("t.json")}).code, 0);
  const auto tapered = io::read_matrix_csv(fs::path(path("t.csv")));
  EXPECT_TRUE(tapered.isApprox(core::sample_covariance(DataMatrix(x)), 1e-15));
  EXPECT_EQ(io::read_json(path("t.json"))["bandwidth"], 8);
}

TEST_F(CliTest, TaperReportsErrorsAgainstTruth) {
  // Bandwidth 20 leaves most of the 40 x 40 matrix zeroed, which is where the truth is zero.
  const Eigen::MatrixXd x = normal_data(400, 40, 8);
  const auto input = write_matrix("x.csv", x);
  const auto truth = write_matrix("truth.csv", Eigen::MatrixXd::Identity(40, 40));
  const auto r = invoke({"taper", "--input", input, "--eta", "0.5", "--truth", truth, "--out", path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  EXPECT_LT(j["operator_error_tapered"].get<double>(), j["operator_error_raw"].get<double>());
  EXPECT_EQ(j["bandwidth"], structure::choose_bandwidth(400, 0.5));
}

TEST_F(CliTest, McDeterministicAcrossThreads) {
  const auto cfg = write("study.json", R"({"generator":{"type":"iid","innovations":{"dist":"normal"}},
      "test":{"kind":"independence"},"replications":40,"n":60,"m":5})");
  ASSERT_EQ(invoke({"mc", "--config", cfg, "--seed", "3", "--threads", "1", "--out", path("a.json"), "--csv",
                 path("a.csv"), "--ecdf", path("a_ecdf.csv")})
                .code,
            0);
  ASSERT_EQ(invoke({"mc", "--config", cfg, "--seed", "3", "--threads", "4", "--out", path("b.json"), "--csv",
                 path("b.csv")})
                .code,
            0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv")).rfind("replication,y,p\n", 0), 0u);
  EXPECT_EQ(slurp(path("a_ecdf.csv")).rfind("y,ecdf,gumbel_cdf\n", 0), 0u);
  EXPECT_EQ(io::read_json(path("a.json"))["replications"], 40);
}

TEST_F(CliTest, McSweepOutputsTable) {
  const auto cfg = write("sweep.json", R"({"generator":{"type":"iid","innovations":{"dist":"normal"}},
      "test":{"kind":"identity"},"master_seed":5,
      "sweep":[{"n":40,"m":4,"replications":30},{"n":80,"m":6,"replications":30}]})");
  const auto r = invoke({"mc", "--config", cfg, "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_TRUE(j.contains("any_non_improvement"));
}

TEST_F(CliTest, DiagnoseIidProcess) {
  const auto spec = write("spec.json", R"({"type":"iid","innovations":{"dist":"normal"},"m":6})");
  const auto r = invoke({"diagnose", "--spec", spec});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  EXPECT_EQ(j["index_set"], "strict_pairs");
  EXPECT_TRUE(j.contains("h_profile"));
  const auto rad = write("rad.json", R"({"type":"iid","innovations":{"dist":"rademacher"},"m":6})");
  EXPECT_EQ(invoke({"diagnose", "--spec", rad, "--index", "diagonal"}).code, cli::kExitError);
}
