#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "covmax/core_stats.hpp"
#include "covmax/diagnostics.hpp"
#include "covmax/errors.hpp"
#include "covmax/mc_harness.hpp"

namespace covmax::io {

using Json = nlohmann::ordered_json;

/// Malformed matrix file; the message names the file, row and column.
class CsvError : public Error {
 public:
  using Error::Error;
};

/// JSON document that does not match the expected shape; carries a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what);
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/**
 * Reads a rectangular numeric CSV. The first line is treated as a header
 * when any of its cells is not a number. Blank lines are skipped; a UTF-8
 * BOM and CRLF endings are tolerated. Every cell must be a finite real.
 */
[[nodiscard]] Eigen::MatrixXd read_matrix_csv(std::istream& in, std::string_view source = "<input>");
[[nodiscard]] Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file);

/// Comma-separated, 17 significant digits, no header.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values);
void write_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& values);

/// printf("%.17g"); non-finite values become "nan"/"inf"/"-inf".
[[nodiscard]] std::string format_number(double v);

/// Serializes with every floating-point value at 17 significant digits.
/// NaN and infinities become null.
[[nodiscard]] std::string dump_json(const Json& doc, int indent = 2);

[[nodiscard]] Json read_json(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, std::string_view text);

/// Generator description parsed from a process spec document.
struct ProcessDocument {
  mc::GeneratorConfig generator;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::uint64_t> seed;
};

[[nodiscard]] ProcessDocument parse_process_spec(const Json& doc, const std::string& path = "");
[[nodiscard]] mc::StudyConfig parse_study_config(const Json& doc, std::optional<std::uint64_t> seed_override);
/// Optional "sweep" array of {n, m, replications} overrides on the base config.
[[nodiscard]] std::vector<mc::StudyConfig> parse_sweep(const Json& doc, const mc::StudyConfig& base);

[[nodiscard]] std::optional<core::Normalization> parse_normalization(std::string_view name);
[[nodiscard]] mc::TestKind parse_test_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(mc::TestKind kind) noexcept;

/// Reports use 1-based variable indices.
[[nodiscard]] Json to_json(const core::TestResult& r, double alpha);
[[nodiscard]] Json to_json(const mc::StudySummary& s, const mc::StudyConfig& cfg);
[[nodiscard]] Json to_json(const mc::SweepTable& t);
[[nodiscard]] Json to_json(const diag::DependenceReport& r);

}  // namespace covmax::io
