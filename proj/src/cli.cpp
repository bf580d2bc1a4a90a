#include "mggd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mggd/errors.hpp"
#include "mggd/estimator.hpp"
#include "mggd/experiments.hpp"
#include "mggd/io.hpp"
#include "mggd/sampler.hpp"

namespace mggd::cli {

namespace {

using nlohmann::json;

// A user-supplied matrix that is not symmetric positive definite.
class BadMatrix : public Error {
public:
    using Error::Error;
};

class Usage : public Error {
public:
    using Error::Error;
};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

SpdMatrix load_spd(const std::string& path, std::optional<std::size_t> expected_dim) {
    const Matrix raw = io::read_matrix(path);
    if (expected_dim && raw.rows() != *expected_dim)
        throw Usage("scatter file " + path + " is " + std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()) +
                    ", expected p = " + std::to_string(*expected_dim));
    try {
        return SpdMatrix(raw);
    } catch (const NotPositiveDefinite& e) {
        throw BadMatrix("scatter file " + path + " is not positive definite: " + e.what());
    } catch (const InvalidArgument& e) {
        throw BadMatrix("scatter file " + path + ": " + e.what());
    }
}

// Trace-p scatter from exactly one of --rho / --scatter-file.
SpdMatrix scenario_scatter(std::size_t p, const std::optional<double>& rho, const std::string& scatter_file,
                           std::ostream& err) {
    if (rho.has_value() == !scatter_file.empty())
        throw Usage("exactly one of --rho or --scatter-file is required");
    if (rho) return toeplitz_rho(p, *rho);
    const SpdMatrix m = load_spd(scatter_file, p);
    const double tr = m.trace();
    if (std::abs(tr - static_cast<double>(p)) > 1e-6)
        err << "warning: scatter trace " << io::format_double(tr) << " renormalized to " << p << '\n';
    return normalize_trace(m);
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        io::write_file(path, text);
}

struct SampleArgs {
    std::size_t p = 0;
    double beta = 0.0;
    double m = 1.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<double> rho;
    std::string scatter_file;
    std::string out;
};

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
    const SpdMatrix scatter = scenario_scatter(a.p, a.rho, a.scatter_file, err);
    const MggdParams params(scatter, a.m, a.beta);
    Rng rng(a.seed, 0);
    const SampleSet data = sample_mggd(params, a.n, rng);
    io::write_dataset(a.out, data);
    const json effective{{"p", a.p},
                         {"beta", a.beta},
                         {"m", a.m},
                         {"n", a.n},
                         {"seed", a.seed},
                         {"scatter", matrix_json(scatter.entries())},
                         {"out", a.out}};
    out << effective.dump() << '\n';
    return kOk;
}

struct FitArgs {
    std::string data;
    std::optional<double> beta;
    double tol = 1e-6;
    int max_iter = 100;
    double beta_init = 0.5;
    std::string init = "scm";
    std::optional<std::uint64_t> seed;
    std::string out;
};

Initializer parse_initializer(const std::string& spec, std::size_t p) {
    if (spec == "identity") return Initializer::identity();
    if (spec == "scm") return Initializer::scaled_scm();
    if (spec.rfind("file:", 0) == 0) return Initializer::user(load_spd(spec.substr(5), p));
    throw Usage("--init must be identity, scm or file:PATH");
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const SampleSet data = io::read_dataset(a.data);
    FitOptions opts;
    opts.tol_c = a.tol;
    opts.max_iter = a.max_iter;
    opts.beta_fixed = a.beta;
    opts.beta_init = a.beta_init;
    opts.init = parse_initializer(a.init, data.dim());
    const FitReport rep = fit_joint(data, opts);
    const auto stop = std::chrono::steady_clock::now();

    io::ReportFile file{.report = rep,
                        .options = io::options_to_json(opts, a.init),
                        .duration_seconds = std::chrono::duration<double>(stop - start).count(),
                        .master_seed = a.seed,
                        .data_path = a.data};
    emit(a.out, io::to_json(file).dump(2) + "\n", out);
    return rep.converged ? kOk : kNotConverged;
}

struct TraceArgs {
    std::string data;
    std::size_t p = 0;
    std::optional<double> beta;
    double m = 1.0;
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> rho;
    std::string scatter_file;
    std::vector<std::string> inits{"identity", "scm", "true"};
    double tol = 1e-6;
    int max_iter = 100;
    std::string out;
};

int cmd_trace(const TraceArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.beta) throw Usage("--beta is required");
    FitOptions opts;
    opts.tol_c = a.tol;
    opts.max_iter = a.max_iter;
    std::vector<InitChoice> inits;
    for (const auto& name : a.inits) {
        try {
            inits.push_back(parse_init_choice(name));
        } catch (const InvalidArgument& e) {
            throw Usage(e.what());
        }
    }
    ConvergenceTrace trace;
    if (!a.data.empty()) {
        const SampleSet data = io::read_dataset(a.data);
        std::optional<SpdMatrix> truth;
        if (!a.scatter_file.empty()) truth = normalize_trace(load_spd(a.scatter_file, data.dim()));
        trace = trace_dataset(data, *a.beta, opts, inits, truth ? &*truth : nullptr);
    } else {
        if (a.p == 0 || a.n == 0 || !a.seed) throw Usage("--p, --n and --seed are required without --data");
        const SpdMatrix truth = scenario_scatter(a.p, a.rho, a.scatter_file, err);
        const MggdParams params(truth, a.m, *a.beta);
        Rng rng(*a.seed, 0);
        const SampleSet data = sample_mggd(params, a.n, rng);
        trace = trace_dataset(data, *a.beta, opts, inits, &truth);
    }
    emit(a.out, io::trace_csv(trace), out);
    return kOk;
}

struct ExperimentArgs {
    std::string config;
    std::string out_dir;
};

void print_summary(const std::vector<MetricsRecord>& rows, std::ostream& out) {
    out << std::left << std::setw(10) << "beta" << std::setw(9) << "N" << std::setw(14) << "bias" << std::setw(14)
        << "consistency" << std::setw(14) << "beta_mean" << std::setw(14) << "beta_var" << "failures\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line << std::left << std::setprecision(6) << std::setw(10) << r.beta_true << std::setw(9) << r.n
             << std::setw(14) << r.bias_norm << std::setw(14) << r.consistency << std::setw(14) << r.beta_mean
             << std::setw(14) << r.beta_var << r.failure_count;
        out << line.str() << '\n';
    }
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
    json j;
    try {
        j = json::parse(io::read_file(a.config));
    } catch (const json::parse_error& e) {
        throw io::FormatError("$", std::string("invalid JSON: ") + e.what());
    }
    const io::ExperimentSpec spec = io::parse_experiment(j);
    std::filesystem::create_directories(a.out_dir);
    const std::filesystem::path dir(a.out_dir);

    if (spec.kind != io::ExperimentSpec::Kind::ConvergenceTrace) {
        const auto rows = spec.kind == io::ExperimentSpec::Kind::BetaVariance ? run_beta_variance(spec.config)
                                                                              : run_bias_consistency(spec.config);
        io::write_file(dir / "metrics.csv", io::metrics_csv(rows));
        print_summary(rows, out);
    }
    if (spec.trace_n) {
        const auto trace = run_convergence_trace(spec.config, spec.trace_inits, *spec.trace_n);
        io::write_file(dir / "trace.csv", io::trace_csv(trace));
        out << "trace: " << trace.c_columns.size() << " initializations, D_normalized "
            << trace.d_normalized.size() << " steps, D_unnormalized " << trace.d_unnormalized.size() << " steps\n";
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximum-likelihood estimation for multivariate generalized Gaussian distributions", "mggd"};
    app.require_subcommand(1);

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "Draw an MGGD data set");
    sample->add_option("--p", sa.p, "Dimension")->required()->check(CLI::PositiveNumber);
    sample->add_option("--beta", sa.beta, "Shape parameter")->required();
    sample->add_option("--m", sa.m, "Scale parameter")->required();
    sample->add_option("--n", sa.n, "Number of observations")->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", sa.seed, "Master seed")->required();
    sample->add_option("--rho", sa.rho, "Toeplitz correlation, M(i,j) = rho^|i-j|");
    sample->add_option("--scatter-file", sa.scatter_file, "CSV p x p scatter matrix");
    sample->add_option("--out", sa.out, "Output CSV")->required();

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Estimate (M, m, beta) from a CSV data set");
    fit->add_option("--data", fa.data, "Input CSV")->required();
    fit->add_option("--beta", fa.beta, "Known shape parameter (skips shape estimation)");
    fit->add_option("--tol", fa.tol, "Stopping threshold on C(k)");
    fit->add_option("--max-iter", fa.max_iter, "Iteration budget");
    fit->add_option("--beta-init", fa.beta_init, "Starting shape for joint fits");
    fit->add_option("--init", fa.init, "identity | scm | file:PATH");
    fit->add_option("--seed", fa.seed, "Seed that produced the data (recorded only)");
    fit->add_option("--out", fa.out, "Report JSON (stdout when omitted)");

    TraceArgs ta;
    auto* trace = app.add_subcommand("trace", "Per-iteration convergence criteria");
    trace->add_option("--data", ta.data, "Input CSV instead of a simulated scenario");
    trace->add_option("--p", ta.p, "Dimension");
    trace->add_option("--beta", ta.beta, "Shape parameter")->required();
    trace->add_option("--m", ta.m, "Scale parameter");
    trace->add_option("--n", ta.n, "Number of observations");
    trace->add_option("--seed", ta.seed, "Master seed");
    trace->add_option("--rho", ta.rho, "Toeplitz correlation");
    trace->add_option("--scatter-file", ta.scatter_file, "CSV p x p scatter matrix");
    trace->add_option("--inits", ta.inits, "Comma-separated initializers")->delimiter(',');
    trace->add_option("--tol", ta.tol, "Stopping threshold");
    trace->add_option("--max-iter", ta.max_iter, "Iteration budget");
    trace->add_option("--out", ta.out, "Output CSV (stdout when omitted)");

    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
    experiment->add_option("--config", ea.config, "Experiment JSON")->required();
    experiment->add_option("--out-dir", ea.out_dir, "Directory for CSV outputs")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kUsage;
    }

    try {
        if (*sample) return cmd_sample(sa, out, err);
        if (*fit) return cmd_fit(fa, out);
        if (*trace) return cmd_trace(ta, out, err);
        return cmd_experiment(ea, out);
    } catch (const BadMatrix& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kBadMatrix;
    } catch (const DegenerateData& e) {
        err << "error: degenerate data: " << one_line(e.what());
        if (e.row() != DegenerateData::npos) err << " (row " << e.row() << ')';
        err << '\n';
        return kDegenerateData;
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kUsage;
    }
}

}  // namespace mggd::cli
