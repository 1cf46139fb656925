#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "wordmap/error.hpp"
#include "wordmap/tsne.hpp"

namespace wordmap::tsne {

namespace {

struct RowSearch {
  double beta;
  bool converged;
};

double entropy_bits(std::span<const double> row) {
  double h = 0.0;
  for (double v : row) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

// Fills `row` with p(j|i) for bandwidth precision `beta`, floored and
// renormalized exactly as returned, and gives its entropy in bits. Distances
// are shifted by their minimum so the largest kernel value is exp(0); the
// shift cancels on normalization.
double evaluate_row(std::span<const double> dist, std::size_t self, double min_dist, double beta,
                    std::span<double> row) {
  double sum = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    row[j] = j == self ? 0.0 : std::exp(-beta * (dist[j] - min_dist));
    sum += row[j];
  }
  double kept = 0.0;
  for (double& v : row) {
    v /= sum;
    if (v < kProbabilityFloor) v = 0.0;
    kept += v;
  }
  for (double& v : row) v /= kept;
  return entropy_bits(row);
}

RowSearch search_row(std::span<const double> dist, std::size_t self, double perplexity,
                     std::span<double> row) {
  double min_dist = std::numeric_limits<double>::infinity();
  double mean_shift = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != self) min_dist = std::min(min_dist, dist[j]);
  }
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != self) mean_shift += dist[j] - min_dist;
  }
  mean_shift /= static_cast<double>(dist.size() - 1);

  const double target = std::log2(perplexity);
  double beta = mean_shift > 0.0 ? 1.0 / mean_shift : 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int iter = 0; iter < kMaxBandwidthIterations; ++iter) {
    const double h = evaluate_row(dist, self, min_dist, beta, row);
    if (std::abs(h - target) <= kPerplexityTolerance) {
      converged = true;
      break;
    }
    if (iter + 1 == kMaxBandwidthIterations) break;
    if (h > target) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = lo == 0.0 ? beta / 2.0 : (beta + lo) / 2.0;
    }
  }

  return {beta, converged};
}

}  // namespace

Matrix pairwise_squared_distances(const Matrix& x, int num_threads) {
  const std::size_t n = x.rows();
  if (n < 2) throw ValidationError("pairwise distances need at least two points");
  if (!x.all_finite()) throw ValidationError("input matrix contains non-finite values");

  Matrix out(n, n);
  detail::parallel_for(n, num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto xi = x.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto xj = x.row(j);
        // Always accumulate from the lower index so (i,j) and (j,i) match bitwise.
        const auto& a = i < j ? xi : xj;
        const auto& b = i < j ? xj : xi;
        double d = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double diff = a[k] - b[k];
          d += diff * diff;
        }
        out(i, j) = d;
      }
    }
  });
  return out;
}

Conditionals conditional_affinities(const Matrix& sq_distances, double perplexity,
                                    int num_threads) {
  const std::size_t n = sq_distances.rows();
  if (sq_distances.cols() != n) throw ValidationError("distance matrix must be square");
  if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n))) {
    throw ConfigError("perplexity must satisfy 1 < perplexity < n (perplexity " +
                      std::to_string(perplexity) + ", n " + std::to_string(n) + ")");
  }

  Conditionals out;
  out.p = Matrix(n, n);
  out.beta.assign(n, 0.0);
  out.log2_perplexity.assign(n, 0.0);
  std::vector<char> converged(n, 0);
  detail::parallel_for(n, num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto result = search_row(sq_distances.row(i), i, perplexity, out.p.row(i));
      out.beta[i] = result.beta;
      converged[i] = result.converged;
      out.log2_perplexity[i] = entropy_bits(out.p.row(i));
    }
  });
  out.converged.assign(converged.begin(), converged.end());
  out.unconverged = static_cast<std::size_t>(std::count(converged.begin(), converged.end(), 0));
  return out;
}

AffinityMatrix symmetrize(const Conditionals& conditionals) {
  const Matrix& c = conditionals.p;
  const std::size_t n = c.rows();
  AffinityMatrix out;
  out.p = Matrix(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (c(i, j) + c(j, i)) * scale;
      out.p(i, j) = v;
      out.p(j, i) = v;
    }
  }
  out.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.sigma[i] = std::sqrt(1.0 / (2.0 * conditionals.beta[i]));
  out.log2_perplexity = conditionals.log2_perplexity;
  out.unconverged = conditionals.unconverged;
  return out;
}

AffinityMatrix calibrate_affinities(const Matrix& sq_distances, double perplexity,
                                    int num_threads) {
  return symmetrize(conditional_affinities(sq_distances, perplexity, num_threads));
}

void low_dim_affinities(const Matrix& y, LowDimAffinities& out, int num_threads) {
  const std::size_t n = y.rows();
  if (!y.all_finite()) throw ValidationError("layout contains non-finite values");
  if (out.q.rows() != n || out.q.cols() != n) out.q = Matrix(n, n);
  if (out.numerators.rows() != n || out.numerators.cols() != n) out.numerators = Matrix(n, n);

  std::vector<double> row_sums(n, 0.0);
  detail::parallel_for(n, num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          out.numerators(i, j) = 0.0;
          continue;
        }
        double d = 0.0;
        for (std::size_t k = 0; k < y.cols(); ++k) {
          const double diff = y(i, k) - y(j, k);
          d += diff * diff;
        }
        const double num = 1.0 / (1.0 + d);
        out.numerators(i, j) = num;
        sum += num;
      }
      row_sums[i] = sum;
    }
  });

  const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
  detail::parallel_for(n, num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out.q(i, j) = j == i ? 0.0 : std::max(out.numerators(i, j) / total, kProbabilityFloor);
      }
    }
  });
}

LowDimAffinities low_dim_affinities(const Matrix& y, int num_threads) {
  LowDimAffinities out;
  low_dim_affinities(y, out, num_threads);
  return out;
}

double kl_divergence(const Matrix& p, const Matrix& q, int num_threads) {
  const std::size_t n = p.rows();
  if (q.rows() != n || q.cols() != p.cols()) throw ValidationError("p and q shapes differ");
  std::vector<double> row_terms(n, 0.0);
  detail::parallel_for(n, num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p.cols(); ++j) {
        const double pij = p(i, j);
        if (j == i || pij <= 0.0) continue;
        acc += pij * std::log(pij / std::max(q(i, j), kProbabilityFloor));
      }
      row_terms[i] = acc;
    }
  });
  return std::accumulate(row_terms.begin(), row_terms.end(), 0.0);
}

}  // namespace wordmap::tsne
