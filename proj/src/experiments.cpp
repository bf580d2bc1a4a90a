#include "mggd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "mggd/errors.hpp"
#include "mggd/sampler.hpp"

namespace mggd {

namespace {

struct RunOutcome {
    Matrix estimate;
    double beta = 0.0;
    int iterations = 0;
};

FitOptions options_for(const ExperimentConfig& cfg, double beta_true, const SpdMatrix& truth) {
    FitOptions opts = cfg.fit;
    if (cfg.mode == FitMode::KnownBeta)
        opts.beta_fixed = beta_true;
    else
        opts.beta_fixed.reset();
    switch (cfg.init) {
        case InitChoice::Identity: opts.init = Initializer::identity(); break;
        case InitChoice::Scm: opts.init = Initializer::scaled_scm(); break;
        case InitChoice::True: opts.init = Initializer::user(truth); break;
    }
    return opts;
}

std::optional<RunOutcome> run_once(const ExperimentConfig& cfg, const MggdParams& params, const FitOptions& opts,
                                   std::size_t n, std::uint64_t run) {
    try {
        Rng rng(cfg.master_seed, run);
        const SampleSet data = sample_mggd(params, n, rng);
        const FitReport rep = fit_joint(data, opts);
        if (!rep.converged) return std::nullopt;
        Matrix est = rep.scatter.entries();
        if (cfg.target == MetricTarget::Sigma) est *= rep.scale;
        return RunOutcome{std::move(est), rep.beta, rep.iterations};
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (p < 1) throw InvalidArgument("p must be at least 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
    if (!(m_true > 0.0)) throw InvalidArgument("m_true must be positive");
    if (n_grid.empty()) throw InvalidArgument("n_grid must not be empty");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw InvalidArgument("n_grid must be strictly ascending");
    if (runs < 1) throw InvalidArgument("runs must be at least 1");
    if (workers < 1) throw InvalidArgument("workers must be at least 1");
    for (double b : shapes())
        if (!(b >= fit.beta_min && b <= fit.beta_max)) throw InvalidArgument("shape outside the working range");
    fit.validate();
}

std::vector<double> ExperimentConfig::shapes() const {
    return beta_grid.empty() ? std::vector<double>{beta_true} : beta_grid;
}

SpdMatrix ExperimentConfig::true_scatter() const { return normalize_trace(toeplitz_rho(p, rho)); }

MetricsRecord run_cell(const ExperimentConfig& cfg, double beta_true, std::size_t n) {
    const SpdMatrix truth = cfg.true_scatter();
    const MggdParams params(truth, cfg.m_true, beta_true);
    const FitOptions opts = options_for(cfg, beta_true, truth);
    Matrix target = truth.entries();
    if (cfg.target == MetricTarget::Sigma) target *= cfg.m_true;

    const auto runs = static_cast<std::size_t>(cfg.runs);
    std::vector<std::optional<RunOutcome>> outcomes(runs);
    const unsigned workers = std::min<unsigned>(cfg.workers, static_cast<unsigned>(runs));
    if (workers <= 1) {
        for (std::size_t r = 0; r < runs; ++r) outcomes[r] = run_once(cfg, params, opts, n, r);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < runs; r += workers) outcomes[r] = run_once(cfg, params, opts, n, r);
            });
    }

    // Deterministic fold in run order.
    MetricsRecord rec;
    rec.beta_true = beta_true;
    rec.n = n;
    rec.runs = cfg.runs;
    Matrix mean(cfg.p, cfg.p);
    double dist_sum = 0.0, beta_sum = 0.0, iter_sum = 0.0, sq_err = 0.0;
    std::size_t ok = 0;
    for (const auto& o : outcomes) {
        if (!o) {
            ++rec.failure_count;
            continue;
        }
        ++ok;
        mean += o->estimate;
        dist_sum += (o->estimate - target).frobenius_norm();
        beta_sum += o->beta;
        iter_sum += o->iterations;
        sq_err += (o->beta - beta_true) * (o->beta - beta_true);
    }
    if (ok == 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.bias_norm = rec.consistency = rec.beta_mean = rec.beta_var = rec.beta_mse = rec.mean_iterations = nan;
        return rec;
    }
    const double k = static_cast<double>(ok);
    mean *= 1.0 / k;
    rec.bias_norm = (mean - target).frobenius_norm();
    rec.consistency = dist_sum / k;
    rec.beta_mean = beta_sum / k;
    rec.beta_mse = sq_err / k;
    rec.mean_iterations = iter_sum / k;
    double var = 0.0;
    for (const auto& o : outcomes)
        if (o) var += (o->beta - rec.beta_mean) * (o->beta - rec.beta_mean);
    rec.beta_var = ok > 1 ? var / (k - 1.0) : 0.0;
    return rec;
}

std::vector<MetricsRecord> run_bias_consistency(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<MetricsRecord> out;
    for (double beta : cfg.shapes())
        for (std::size_t n : cfg.n_grid) out.push_back(run_cell(cfg, beta, n));
    return out;
}

std::vector<MetricsRecord> run_beta_variance(const ExperimentConfig& cfg) {
    if (cfg.mode != FitMode::JointFit) throw InvalidArgument("shape-variance sweeps need mode = JointFit");
    return run_bias_consistency(cfg);
}

ConvergenceTrace trace_dataset(const SampleSet& data, double beta, const FitOptions& opts,
                               const std::vector<InitChoice>& inits, const SpdMatrix* truth) {
    ConvergenceTrace out;
    for (InitChoice c : inits) {
        FitOptions o = opts;
        switch (c) {
            case InitChoice::Identity: o.init = Initializer::identity(); break;
            case InitChoice::Scm: o.init = Initializer::scaled_scm(); break;
            case InitChoice::True:
                if (!truth) throw InvalidArgument("the 'true' initializer needs a reference scatter matrix");
                o.init = Initializer::user(*truth);
                break;
        }
        const FitReport rep = fit_scatter_fp(data, beta, o);
        out.init_names.emplace_back(init_name(c));
        out.c_columns.push_back(rep.c_trace);
        out.final_scatter.push_back(rep.scatter.entries());
    }

    // D(k) from the same SCM start for both recursions.
    const SpdMatrix scm(sample_covariance(data));
    {
        SpdMatrix m = normalize_trace(scm);
        Matrix a = m.entries() * estimate_scale(m, data, beta);
        for (int k = 0; k < opts.max_iter; ++k) {
            m = normalize_trace(fp_map(m, data, beta));
            Matrix next = m.entries() * estimate_scale(m, data, beta);
            const double d = relative_frobenius_distance(next, a);
            out.d_normalized.push_back(d);
            a = std::move(next);
            if (d < opts.tol_c) break;
        }
    }
    {
        SpdMatrix sigma = scm;
        for (int k = 0; k < opts.max_iter; ++k) {
            SpdMatrix next = sigma_map(sigma, data, beta);
            const double d = relative_frobenius_distance(next.entries(), sigma.entries());
            out.d_unnormalized.push_back(d);
            sigma = std::move(next);
            if (d < opts.tol_c) break;
        }
    }
    return out;
}

ConvergenceTrace run_convergence_trace(const ExperimentConfig& cfg, const std::vector<InitChoice>& inits,
                                       std::size_t n) {
    cfg.validate();
    const SpdMatrix truth = cfg.true_scatter();
    const MggdParams params(truth, cfg.m_true, cfg.beta_true);
    Rng rng(cfg.master_seed, 0);
    const SampleSet data = sample_mggd(params, n, rng);
    return trace_dataset(data, cfg.beta_true, cfg.fit, inits, &truth);
}

std::size_t iterations_to_tol(const std::vector<double>& criterion, double tol) {
    for (std::size_t k = 0; k < criterion.size(); ++k)
        if (criterion[k] < tol) return k + 1;
    return criterion.size() + 1;
}

const char* init_name(InitChoice c) {
    switch (c) {
        case InitChoice::Identity: return "identity";
        case InitChoice::Scm: return "scm";
        case InitChoice::True: return "true";
    }
    return "?";
}

InitChoice parse_init_choice(const std::string& name) {
    if (name == "identity") return InitChoice::Identity;
    if (name == "scm") return InitChoice::Scm;
    if (name == "true") return InitChoice::True;
    throw InvalidArgument("unknown initializer '" + name + "'");
}

}  // namespace mggd
