#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wordmap/matrix.hpp"

/// Exact O(n^2) t-SNE: Gaussian input affinities calibrated to a target
/// perplexity, Student-t output affinities, and gradient descent with
/// momentum on KL(P || Q).
namespace wordmap::tsne {

/// q entries are clamped to at least this value; normalized conditional
/// input affinities below it are set to zero.
inline constexpr double kProbabilityFloor = 1e-12;

/// Bandwidth search stops once |log2(perplexity) - log2(target)| is below this.
inline constexpr double kPerplexityTolerance = 1e-5;
inline constexpr int kMaxBandwidthIterations = 50;

struct Config {
  int out_dims = 2;
  double perplexity = 30.0;
  double learning_rate = 200.0;
  int n_iter = 1000;
  double early_exaggeration_factor = 12.0;
  int early_exaggeration_iters = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
  std::uint64_t seed = 42;
  /// Standard deviation of the Gaussian initial layout.
  double init_stddev = 1e-4;
  /// Per-coordinate adaptive step sizes (+0.2 when the gradient flips sign
  /// relative to the last update, x0.8 otherwise, floor 0.01).
  bool adaptive_gains = true;
  /// Record KL every this many iterations (the initial and final layouts
  /// are always recorded).
  int kl_interval = 1;
  /// Worker threads for row-parallel stages. Results do not depend on it.
  int num_threads = 1;
};

/// Throws ConfigError unless `config` is usable for `n_points` inputs.
void validate(const Config& config, std::size_t n_points);

/// Per-point conditional distributions p(j|i), row-stochastic.
struct Conditionals {
  Matrix p;
  /// Gaussian precision 1 / (2 sigma_i^2) found by the search.
  std::vector<double> beta;
  /// log2 of the perplexity realized by each row of `p`.
  std::vector<double> log2_perplexity;
  std::vector<bool> converged;
  std::size_t unconverged = 0;
};

/// Symmetric joint input affinities with zero diagonal summing to one.
struct AffinityMatrix {
  Matrix p;
  /// Gaussian bandwidth of each point.
  std::vector<double> sigma;
  std::vector<double> log2_perplexity;
  /// Number of points whose bandwidth search hit the iteration limit. The
  /// last bandwidth tried is used for those points.
  std::size_t unconverged = 0;
};

struct LowDimAffinities {
  Matrix q;
  /// (1 + |y_i - y_j|^2)^-1 off the diagonal, zero on it.
  Matrix numerators;
};

struct KlSample {
  int iteration;  // number of updates applied before the evaluation
  double kl;
};

struct Result {
  Matrix coords;
  std::vector<KlSample> kl_history;
  double initial_kl = 0.0;
  double final_kl = 0.0;
  std::size_t unconverged_points = 0;
};

/// Squared Euclidean distances between rows. Throws ValidationError for
/// fewer than two rows or non-finite input.
Matrix pairwise_squared_distances(const Matrix& x, int num_threads = 1);

Conditionals conditional_affinities(const Matrix& sq_distances, double perplexity,
                                    int num_threads = 1);

/// p_ij = (p(j|i) + p(i|j)) / 2n.
AffinityMatrix symmetrize(const Conditionals& conditionals);

/// Throws ConfigError unless 1 < perplexity < n.
AffinityMatrix calibrate_affinities(const Matrix& sq_distances, double perplexity,
                                    int num_threads = 1);

LowDimAffinities low_dim_affinities(const Matrix& y, int num_threads = 1);

/// Reuses the buffers in `out`.
void low_dim_affinities(const Matrix& y, LowDimAffinities& out, int num_threads = 1);

/// Sum over pairs of p log(p / q); pairs with p == 0 contribute nothing.
double kl_divergence(const Matrix& p, const Matrix& q, int num_threads = 1);

/// d KL / d y_i = 4 sum_j (p_ij - q_ij) num_ij (y_i - y_j).
Matrix gradient(const Matrix& p, const Matrix& q, const Matrix& numerators, const Matrix& y,
                int num_threads = 1);

/// Same, with every p_ij multiplied by `p_scale` (early exaggeration).
void gradient(const Matrix& p, double p_scale, const Matrix& q, const Matrix& numerators,
              const Matrix& y, Matrix& out, int num_threads = 1);

/// Runs the full optimization on the rows of `x`. Throws ConfigError for
/// invalid settings and DivergenceError if coordinates become non-finite.
Result run_tsne(const Matrix& x, const Config& config);

/// Seeded Gaussian layout used as the starting point of run_tsne.
Matrix initial_layout(std::size_t n, int dims, std::uint64_t seed, double stddev);

}  // namespace wordmap::tsne
