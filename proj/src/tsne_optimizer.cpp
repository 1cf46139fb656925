#include <cmath>
#include <numbers>
#include <random>

#include "wordmap/error.hpp"
#include "wordmap/tsne.hpp"

namespace wordmap::tsne {

namespace {

// Box-Muller on 53-bit uniforms drawn from mt19937_64. Spelled out rather
// than using std::normal_distribution, whose algorithm varies between
// standard libraries.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

void recenter(Matrix& y) {
  const std::size_t n = y.rows();
  for (std::size_t k = 0; k < y.cols(); ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += y(i, k);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) y(i, k) -= mean;
  }
}

}  // namespace

void validate(const Config& c, std::size_t n_points) {
  const auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (n_points < 4) fail("t-SNE needs at least 4 points, got " + std::to_string(n_points));
  if (c.out_dims < 1) fail("out_dims must be positive");
  if (!(c.perplexity > 1.0)) fail("perplexity must be greater than 1");
  if (!(c.perplexity < static_cast<double>(n_points))) {
    fail("perplexity (" + std::to_string(c.perplexity) + ") must be less than the number of points (" +
         std::to_string(n_points) + ")");
  }
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) fail("learning_rate must be positive");
  if (c.n_iter < 1) fail("n_iter must be positive");
  if (!(c.early_exaggeration_factor >= 1.0) || !std::isfinite(c.early_exaggeration_factor)) {
    fail("early_exaggeration_factor must be at least 1");
  }
  if (c.early_exaggeration_iters < 0 || c.early_exaggeration_iters > c.n_iter) {
    fail("early_exaggeration_iters must be in [0, n_iter]");
  }
  if (!(c.momentum_initial >= 0.0 && c.momentum_initial < 1.0)) fail("momentum_initial must be in [0, 1)");
  if (!(c.momentum_final >= 0.0 && c.momentum_final < 1.0)) fail("momentum_final must be in [0, 1)");
  if (c.momentum_switch_iter < 0) fail("momentum_switch_iter must be non-negative");
  if (!(c.init_stddev > 0.0) || !std::isfinite(c.init_stddev)) fail("init_stddev must be positive");
  if (c.kl_interval < 1) fail("kl_interval must be positive");
}

Matrix initial_layout(std::size_t n, int dims, std::uint64_t seed, double stddev) {
  Matrix y(n, static_cast<std::size_t>(dims));
  GaussianSource gauss(seed);
  for (double& v : y.data()) v = stddev * gauss.next();
  return y;
}

Result run_tsne(const Matrix& x, const Config& config) {
  const std::size_t n = x.rows();
  validate(config, n);
  if (x.cols() < 1) throw ConfigError("input vectors must have at least one dimension");
  const int threads = config.num_threads;

  AffinityMatrix affinities = [&] {
    const Matrix distances = pairwise_squared_distances(x, threads);
    return calibrate_affinities(distances, config.perplexity, threads);
  }();
  const Matrix& p = affinities.p;

  Result result;
  result.unconverged_points = affinities.unconverged;
  Matrix y = initial_layout(n, config.out_dims, config.seed, config.init_stddev);
  const std::size_t dims = y.cols();
  Matrix grad(n, dims);
  Matrix velocity(n, dims);
  Matrix gains(n, dims, 1.0);
  LowDimAffinities low;

  for (int iter = 0; iter < config.n_iter; ++iter) {
    low_dim_affinities(y, low, threads);
    if (iter % config.kl_interval == 0) {
      result.kl_history.push_back({iter, kl_divergence(p, low.q, threads)});
    }

    const double exaggeration =
        iter < config.early_exaggeration_iters ? config.early_exaggeration_factor : 1.0;
    gradient(p, exaggeration, low.q, low.numerators, y, grad, threads);

    const double momentum =
        iter < config.momentum_switch_iter ? config.momentum_initial : config.momentum_final;
    auto g = grad.data();
    auto v = velocity.data();
    auto gain = gains.data();
    auto coords = y.data();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (config.adaptive_gains) {
        gain[k] = (g[k] > 0.0) != (v[k] > 0.0) ? gain[k] + 0.2 : gain[k] * 0.8;
        gain[k] = std::max(gain[k], 0.01);
      }
      v[k] = momentum * v[k] - config.learning_rate * gain[k] * g[k];
      coords[k] += v[k];
    }
    recenter(y);
    if (!y.all_finite()) throw DivergenceError(iter);
  }

  low_dim_affinities(y, low, threads);
  result.final_kl = kl_divergence(p, low.q, threads);
  result.kl_history.push_back({config.n_iter, result.final_kl});
  result.initial_kl = result.kl_history.front().kl;
  result.coords = std::move(y);
  return result;
}

}  // namespace wordmap::tsne
