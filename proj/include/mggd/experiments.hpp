#pragma once

// Monte Carlo harness: bias/consistency sweeps, shape-variance sweeps and
// convergence traces on a Toeplitz scatter M(i, j) = rho^|i-j|.
//
// Run r of every cell draws its data from Rng(master_seed, r), so a cell is
// reproducible from (master_seed, N, run range) alone and results do not
// depend on the number of workers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mggd/estimator.hpp"

namespace mggd {

enum class FitMode { KnownBeta, JointFit };

// Which matrix the bias/consistency metrics compare: the trace-p scatter M
// or Sigma = m M.
enum class MetricTarget { Scatter, Sigma };

enum class InitChoice { Identity, Scm, True };

struct ExperimentConfig {
    std::size_t p = 3;
    double rho = 0.8;
    double beta_true = 0.2;
    double m_true = 1.0;
    std::vector<std::size_t> n_grid;
    // When non-empty, each listed shape replaces beta_true as a sweep axis.
    std::vector<double> beta_grid;
    int runs = 100;
    FitMode mode = FitMode::KnownBeta;
    MetricTarget target = MetricTarget::Scatter;
    std::uint64_t master_seed = 0;
    FitOptions fit;
    InitChoice init = InitChoice::Scm;
    unsigned workers = 1;

    // n_grid non-empty and strictly ascending, runs >= 1, model values valid.
    void validate() const;
    std::vector<double> shapes() const;
    // Toeplitz scatter normalized to trace p.
    SpdMatrix true_scatter() const;
};

struct MetricsRecord {
    double beta_true = 0.0;
    std::size_t n = 0;
    int runs = 0;
    double bias_norm = 0.0;       // ||mean(A_hat) - A||_F
    double consistency = 0.0;     // mean ||A_hat - A||_F
    double beta_mean = 0.0;
    double beta_var = 0.0;        // unbiased sample variance of beta_hat
    double beta_mse = 0.0;
    double mean_iterations = 0.0;
    int failure_count = 0;        // thrown errors plus non-converged fits
};

// One (beta, N) cell: runs fits and aggregates over the successful ones.
// A cell where every run fails reports NaN metrics.
MetricsRecord run_cell(const ExperimentConfig& cfg, double beta_true, std::size_t n);

// Every (shape, N) cell of the configuration, shapes outermost.
std::vector<MetricsRecord> run_bias_consistency(const ExperimentConfig& cfg);

// Same sweep restricted to JointFit; throws InvalidArgument otherwise.
std::vector<MetricsRecord> run_beta_variance(const ExperimentConfig& cfg);

struct ConvergenceTrace {
    std::vector<std::string> init_names;     // "identity", "scm", "true"
    std::vector<std::vector<double>> c_columns;
    std::vector<Matrix> final_scatter;       // per initializer
    std::vector<double> d_normalized;        // D(k) on m_k M_k, trace-normalized recursion
    std::vector<double> d_unnormalized;      // D(k) on Sigma_k, unnormalized recursion
};

// Single data set drawn from Rng(master_seed, 0) at shape beta_true and size
// n. Each recursion runs until its criterion drops below cfg.fit.tol_c or
// cfg.fit.max_iter steps.
ConvergenceTrace run_convergence_trace(const ExperimentConfig& cfg, const std::vector<InitChoice>& inits,
                                       std::size_t n);

// Same traces on a caller-supplied data set; `truth` backs InitChoice::True.
ConvergenceTrace trace_dataset(const SampleSet& data, double beta, const FitOptions& opts,
                               const std::vector<InitChoice>& inits, const SpdMatrix* truth);

// Number of steps until the criterion first drops below tol, or the trace
// length plus one if it never does.
std::size_t iterations_to_tol(const std::vector<double>& criterion, double tol);

const char* init_name(InitChoice c);
InitChoice parse_init_choice(const std::string& name);

}  // namespace mggd
