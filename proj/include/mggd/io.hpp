#pragma once

// File formats: CSV data sets and scatter matrices, JSON fit reports and
// experiment configurations, CSV metric and trace tables. Floats are always
// written in shortest round-trip form.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mggd/errors.hpp"
#include "mggd/estimator.hpp"
#include "mggd/experiments.hpp"

namespace mggd::io {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

// Shortest decimal string that parses back to the same double; "nan",
// "inf" and "-inf" for non-finite values.
std::string format_double(double v);
double parse_double(std::string_view s);

// Raised for malformed files; `where` locates the problem (line number or
// JSON path).
class FormatError : public Error {
public:
    FormatError(std::string where, const std::string& what)
        : Error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

// Comma-separated rows with an optional non-numeric header line.
Matrix parse_csv_matrix(std::string_view text);
std::string to_csv(const SampleSet& data, bool header = true);
SampleSet parse_dataset(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

SampleSet read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const SampleSet& data);
// p x p matrix; not yet checked for positive definiteness.
Matrix read_matrix(const std::filesystem::path& path);

// Report file: the FitReport plus provenance.
struct ReportFile {
    FitReport report;
    nlohmann::json options;         // echo of the effective options
    double duration_seconds = 0.0;
    std::optional<std::uint64_t> master_seed;
    std::string data_path;
    std::string tool_version = kToolVersion;
};

nlohmann::json options_to_json(const FitOptions& opts, const std::string& init_label);
nlohmann::json to_json(const ReportFile& file);
ReportFile report_from_json(const nlohmann::json& j);

// Experiment configuration. Schema violations raise FormatError whose
// where() is the JSON path of the offending field (e.g. "$.n_grid").
struct ExperimentSpec {
    enum class Kind { BiasConsistency, BetaVariance, ConvergenceTrace };
    Kind kind = Kind::BiasConsistency;
    ExperimentConfig config;
    // Optional trace section.
    std::optional<std::size_t> trace_n;
    std::vector<InitChoice> trace_inits;
};

ExperimentSpec parse_experiment(const nlohmann::json& j);

// Column order: beta_true,n,runs,bias_norm,consistency,beta_mean,beta_var,
// beta_mse,mean_iterations,failure_count
std::string metrics_csv(const std::vector<MetricsRecord>& rows);

// Column order: k, C_<init> for each initializer, D_normalized,
// D_unnormalized. k starts at 0; a variant that has already stopped leaves
// its cell empty.
std::string trace_csv(const ConvergenceTrace& trace);

}  // namespace mggd::io
