#include "mggd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mggd/errors.hpp"

namespace mggd::io {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

bool non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> try_parse(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

double parse_double(std::string_view s) {
    const auto v = try_parse(s);
    if (!v) throw FormatError("value", "cannot parse '" + std::string(s) + "' as a number");
    return *v;
}

Matrix parse_csv_matrix(std::string_view text) {
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, line_no = 0;
    bool first = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> parsed;
        parsed.reserve(fields.size());
        bool numeric = true;
        for (auto f : fields) {
            const auto v = try_parse(f);
            if (!v) {
                numeric = false;
                break;
            }
            parsed.push_back(*v);
        }
        if (!numeric) {
            if (first) {
                cols = fields.size();
                first = false;
                continue;  // header
            }
            throw FormatError("line " + std::to_string(line_no), "non-numeric field");
        }
        if (cols == 0) cols = parsed.size();
        if (parsed.size() != cols)
            throw FormatError("line " + std::to_string(line_no),
                              "expected " + std::to_string(cols) + " columns, found " + std::to_string(parsed.size()));
        first = false;
        values.insert(values.end(), parsed.begin(), parsed.end());
        ++rows;
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
    return m;
}

std::string to_csv(const SampleSet& data, bool header) {
    std::string out;
    if (header) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            if (j) out += ',';
            out += 'x' + std::to_string(j);
        }
        out += '\n';
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto r = data.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out += ',';
            out += format_double(r[j]);
        }
        out += '\n';
    }
    return out;
}

SampleSet parse_dataset(std::string_view text) {
    const Matrix m = parse_csv_matrix(text);
    if (m.rows() == 0 || m.cols() == 0) throw FormatError("data", "no observations");
    return SampleSet(m);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path.string(), "cannot open file for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

SampleSet read_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

void write_dataset(const std::filesystem::path& path, const SampleSet& data) { write_file(path, to_csv(data)); }

Matrix read_matrix(const std::filesystem::path& path) {
    Matrix m = parse_csv_matrix(read_file(path));
    if (m.rows() == 0 || !m.square()) throw FormatError(path.string(), "expected a square matrix");
    return m;
}

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (double v : m.row(i)) r.push_back(v);
        rows.push_back(std::move(r));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const std::size_t n = j.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (j[i].size() != n) throw FormatError("$.scatter", "matrix must be square");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

}  // namespace

json options_to_json(const FitOptions& opts, const std::string& init_label) {
    return json{{"tol", opts.tol_c},
                {"max_iter", opts.max_iter},
                {"beta_fixed", opts.beta_fixed ? json(*opts.beta_fixed) : json(nullptr)},
                {"beta_init", opts.beta_init},
                {"init", init_label},
                {"newton_max_step", opts.newton_max_step},
                {"beta_clamp", json::array({opts.beta_min, opts.beta_max})}};
}

json to_json(const ReportFile& file) {
    const FitReport& r = file.report;
    return json{{"schema_version", kReportSchemaVersion},
                {"tool_version", file.tool_version},
                {"data", file.data_path},
                {"master_seed", file.master_seed ? json(*file.master_seed) : json(nullptr)},
                {"duration_seconds", file.duration_seconds},
                {"options", file.options},
                {"scatter", matrix_json(r.scatter.entries())},
                {"scale", r.scale},
                {"beta", r.beta},
                {"iterations", r.iterations},
                {"c_trace", r.c_trace},
                {"alpha_residual", r.alpha_residual},
                {"converged", r.converged},
                {"objective", r.objective}};
}

ReportFile report_from_json(const json& j) {
    try {
        if (j.at("schema_version").get<int>() != kReportSchemaVersion)
            throw FormatError("$.schema_version", "unsupported schema version");
        FitReport r{.scatter = SpdMatrix(matrix_from_json(j.at("scatter"))),
                    .scale = j.at("scale").get<double>(),
                    .beta = j.at("beta").get<double>(),
                    .iterations = j.at("iterations").get<int>(),
                    .c_trace = j.at("c_trace").get<std::vector<double>>(),
                    .alpha_residual = j.at("alpha_residual").get<double>(),
                    .converged = j.at("converged").get<bool>(),
                    .objective = j.at("objective").get<double>()};
        ReportFile f{.report = std::move(r),
                     .options = j.at("options"),
                     .duration_seconds = j.at("duration_seconds").get<double>(),
                     .master_seed = std::nullopt,
                     .data_path = j.at("data").get<std::string>(),
                     .tool_version = j.at("tool_version").get<std::string>()};
        if (!j.at("master_seed").is_null()) f.master_seed = j.at("master_seed").get<std::uint64_t>();
        return f;
    } catch (const json::exception& e) {
        throw FormatError("$", e.what());
    }
}

namespace {

// Typed accessors that report the JSON path on failure.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    bool has(const char* key) const { return j_.contains(key); }
    std::string at(const char* key) const { return path_ + "." + key; }

    double number(const char* key, std::optional<double> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw FormatError(at(key), "required field is missing");
        }
        if (!j_[key].is_number()) throw FormatError(at(key), "expected a number");
        return j_[key].get<double>();
    }

    std::uint64_t integer(const char* key, std::optional<std::uint64_t> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw FormatError(at(key), "required field is missing");
        }
        if (!non_negative_integer(j_[key])) throw FormatError(at(key), "expected a non-negative integer");
        return j_[key].get<std::uint64_t>();
    }

    std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw FormatError(at(key), "required field is missing");
        }
        if (!j_[key].is_string()) throw FormatError(at(key), "expected a string");
        return j_[key].get<std::string>();
    }

    const json& array(const char* key) const {
        if (!has(key)) throw FormatError(at(key), "required field is missing");
        if (!j_[key].is_array()) throw FormatError(at(key), "expected an array");
        return j_[key];
    }

private:
    const json& j_;
    std::string path_;
};

}  // namespace

ExperimentSpec parse_experiment(const json& j) {
    if (!j.is_object()) throw FormatError("$", "expected an object");
    static const std::vector<std::string> known = {"experiment", "p",       "rho",  "beta_true", "m_true",
                                                   "n_grid",     "beta_grid", "runs", "mode",      "target",
                                                   "master_seed", "workers", "init", "fit",       "trace"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw FormatError("$." + key, "unknown field");

    const Reader r(j, "$");
    ExperimentSpec spec;
    const std::string kind = r.string("experiment");
    if (kind == "bias_consistency")
        spec.kind = ExperimentSpec::Kind::BiasConsistency;
    else if (kind == "beta_variance")
        spec.kind = ExperimentSpec::Kind::BetaVariance;
    else if (kind == "convergence_trace")
        spec.kind = ExperimentSpec::Kind::ConvergenceTrace;
    else
        throw FormatError("$.experiment", "expected bias_consistency, beta_variance or convergence_trace");

    ExperimentConfig& c = spec.config;
    c.p = r.integer("p");
    if (c.p < 1) throw FormatError("$.p", "must be at least 1");
    c.rho = r.number("rho");
    if (!(c.rho >= 0.0 && c.rho < 1.0)) throw FormatError("$.rho", "must lie in [0, 1)");
    c.beta_true = r.number("beta_true", 0.5);
    c.m_true = r.number("m_true", 1.0);
    if (!(c.m_true > 0.0)) throw FormatError("$.m_true", "must be positive");
    c.runs = static_cast<int>(r.integer("runs", 100));
    if (c.runs < 1) throw FormatError("$.runs", "must be at least 1");
    c.master_seed = r.integer("master_seed");
    c.workers = static_cast<unsigned>(r.integer("workers", 1));
    if (c.workers < 1) throw FormatError("$.workers", "must be at least 1");

    if (spec.kind != ExperimentSpec::Kind::ConvergenceTrace || r.has("n_grid")) {
        const json& grid = r.array("n_grid");
        if (grid.empty()) throw FormatError("$.n_grid", "must not be empty");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::string path = "$.n_grid[" + std::to_string(i) + "]";
            if (!non_negative_integer(grid[i]) || grid[i].get<std::uint64_t>() == 0)
                throw FormatError(path, "expected a positive integer");
            c.n_grid.push_back(grid[i].get<std::size_t>());
            if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) throw FormatError(path, "n_grid must be strictly ascending");
        }
    }
    if (r.has("beta_grid")) {
        const json& grid = r.array("beta_grid");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!grid[i].is_number())
                throw FormatError("$.beta_grid[" + std::to_string(i) + "]", "expected a number");
            c.beta_grid.push_back(grid[i].get<double>());
        }
    }

    const std::string mode = r.string("mode", std::string("known_beta"));
    if (mode == "known_beta")
        c.mode = FitMode::KnownBeta;
    else if (mode == "joint")
        c.mode = FitMode::JointFit;
    else
        throw FormatError("$.mode", "expected known_beta or joint");
    if (spec.kind == ExperimentSpec::Kind::BetaVariance && c.mode != FitMode::JointFit)
        throw FormatError("$.mode", "beta_variance requires mode = joint");

    const std::string target = r.string("target", std::string("scatter"));
    if (target == "scatter")
        c.target = MetricTarget::Scatter;
    else if (target == "sigma")
        c.target = MetricTarget::Sigma;
    else
        throw FormatError("$.target", "expected scatter or sigma");

    try {
        c.init = parse_init_choice(r.string("init", std::string("scm")));
    } catch (const InvalidArgument& e) {
        throw FormatError("$.init", e.what());
    }

    if (r.has("fit")) {
        if (!j["fit"].is_object()) throw FormatError("$.fit", "expected an object");
        const Reader f(j["fit"], "$.fit");
        c.fit.tol_c = f.number("tol", c.fit.tol_c);
        if (!(c.fit.tol_c > 0.0)) throw FormatError("$.fit.tol", "must be positive");
        c.fit.max_iter = static_cast<int>(f.integer("max_iter", static_cast<std::uint64_t>(c.fit.max_iter)));
        if (c.fit.max_iter < 1) throw FormatError("$.fit.max_iter", "must be at least 1");
        c.fit.beta_init = f.number("beta_init", c.fit.beta_init);
        if (!(c.fit.beta_init >= c.fit.beta_min && c.fit.beta_init <= c.fit.beta_max))
            throw FormatError("$.fit.beta_init", "must lie in [0.01, 0.99]");
        c.fit.newton_max_step = f.number("newton_max_step", c.fit.newton_max_step);
        if (!(c.fit.newton_max_step > 0.0)) throw FormatError("$.fit.newton_max_step", "must be positive");
    }

    for (std::size_t i = 0; i < c.shapes().size(); ++i) {
        const double b = c.shapes()[i];
        if (!(b >= c.fit.beta_min && b <= c.fit.beta_max))
            throw FormatError(c.beta_grid.empty() ? "$.beta_true" : "$.beta_grid[" + std::to_string(i) + "]",
                              "must lie in [0.01, 0.99]");
    }

    if (r.has("trace")) {
        if (!j["trace"].is_object()) throw FormatError("$.trace", "expected an object");
        const Reader t(j["trace"], "$.trace");
        spec.trace_n = t.integer("n");
        if (*spec.trace_n < 1) throw FormatError("$.trace.n", "must be positive");
        if (t.has("inits")) {
            const json& inits = t.array("inits");
            for (std::size_t i = 0; i < inits.size(); ++i) {
                const std::string path = "$.trace.inits[" + std::to_string(i) + "]";
                if (!inits[i].is_string()) throw FormatError(path, "expected a string");
                try {
                    spec.trace_inits.push_back(parse_init_choice(inits[i].get<std::string>()));
                } catch (const InvalidArgument& e) {
                    throw FormatError(path, e.what());
                }
            }
        }
    }
    if (spec.trace_inits.empty())
        spec.trace_inits = {InitChoice::Identity, InitChoice::Scm, InitChoice::True};
    if (spec.kind == ExperimentSpec::Kind::ConvergenceTrace && !spec.trace_n)
        throw FormatError("$.trace", "convergence_trace requires a trace section");
    return spec;
}

std::string metrics_csv(const std::vector<MetricsRecord>& rows) {
    std::string out = "beta_true,n,runs,bias_norm,consistency,beta_mean,beta_var,beta_mse,mean_iterations,failure_count\n";
    for (const auto& m : rows) {
        out += format_double(m.beta_true) + ',' + std::to_string(m.n) + ',' + std::to_string(m.runs) + ',' +
               format_double(m.bias_norm) + ',' + format_double(m.consistency) + ',' + format_double(m.beta_mean) +
               ',' + format_double(m.beta_var) + ',' + format_double(m.beta_mse) + ',' +
               format_double(m.mean_iterations) + ',' + std::to_string(m.failure_count) + '\n';
    }
    return out;
}

std::string trace_csv(const ConvergenceTrace& trace) {
    std::string out = "k";
    for (const auto& name : trace.init_names) out += ",C_" + name;
    out += ",D_normalized,D_unnormalized\n";
    std::size_t rows = std::max(trace.d_normalized.size(), trace.d_unnormalized.size());
    for (const auto& c : trace.c_columns) rows = std::max(rows, c.size());
    auto cell = [](const std::vector<double>& v, std::size_t k) {
        return k < v.size() ? format_double(v[k]) : std::string();
    };
    for (std::size_t k = 0; k < rows; ++k) {
        out += std::to_string(k);
        for (const auto& c : trace.c_columns) out += ',' + cell(c, k);
        out += ',' + cell(trace.d_normalized, k) + ',' + cell(trace.d_unnormalized, k) + '\n';
    }
    return out;
}

}  // namespace mggd::io
