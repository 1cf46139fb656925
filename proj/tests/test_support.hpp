#pragma once

// Helpers shared by the unit tests and the acceptance suite. Oracles here
// are deliberately naive and must not call into the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wordmap/embedding_store.hpp"
#include "wordmap/matrix.hpp"
#include "wordmap/tsne.hpp"

namespace wordmap::testing {

inline std::string random_word(std::mt19937_64& rng, std::size_t index) {
  static const std::vector<std::string> kPieces = {"a", "b", "c", "é", "d", "ß", "e", "x",
                                                    "-", "'", "z", "q", "ж", "o"};
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, kPieces.size() - 1);
  std::string w = "w" + std::to_string(index);
  for (std::size_t i = len(rng); i > 0; --i) w += kPieces[pick(rng)];
  return w;
}

inline embed::EmbeddingModel random_model(std::mt19937_64& rng, std::size_t vocab,
                                          std::size_t dim) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<std::string> words;
  std::vector<float> values;
  for (std::size_t i = 0; i < vocab; ++i) {
    words.push_back(random_word(rng, i));
    for (std::size_t d = 0; d < dim; ++d) values.push_back(gauss(rng));
  }
  std::shuffle(words.begin(), words.end(), rng);
  return embed::EmbeddingModel(dim, std::move(words), std::move(values));
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = gauss(rng);
  return m;
}

/// Exhaustive 3CosAdd: normalizes in double straight from the raw vectors,
/// scores every non-input, non-zero word and fully sorts.
inline std::vector<embed::SimilarityHit> brute_force_analogy(
    const embed::EmbeddingModel& model, const std::vector<std::string>& positive,
    const std::vector<std::string>& negative, std::size_t k) {
  const std::size_t dim = model.dim();
  const auto unit = [&](const std::string& w) {
    const auto v = *model.lookup(w);
    double n = 0.0;
    for (float x : v) n += double(x) * double(x);
    n = std::sqrt(n);
    std::vector<double> u(dim);
    for (std::size_t d = 0; d < dim; ++d) u[d] = v[d] / n;
    return u;
  };
  std::vector<double> query(dim, 0.0);
  for (const auto& w : positive) {
    const auto u = unit(w);
    for (std::size_t d = 0; d < dim; ++d) query[d] += u[d];
  }
  for (const auto& w : negative) {
    const auto u = unit(w);
    for (std::size_t d = 0; d < dim; ++d) query[d] -= u[d];
  }
  double qn = 0.0;
  for (double q : query) qn += q * q;
  qn = std::sqrt(qn);

  std::vector<embed::SimilarityHit> all;
  for (const auto& w : model.words()) {
    if (std::find(positive.begin(), positive.end(), w) != positive.end()) continue;
    if (std::find(negative.begin(), negative.end(), w) != negative.end()) continue;
    const auto v = *model.lookup(w);
    double dot = 0.0;
    double n = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      dot += query[d] * v[d];
      n += double(v[d]) * double(v[d]);
    }
    if (n == 0.0) continue;
    all.push_back({w, dot / (qn * std::sqrt(n))});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.word < b.word;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

/// Same words in the same order, scores within `tol`.
inline bool same_hits(const std::vector<embed::SimilarityHit>& got,
                      const std::vector<embed::SimilarityHit>& want, double tol = 1e-6) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].word != want[i].word || std::abs(got[i].score - want[i].score) > tol) return false;
  }
  return true;
}

/// Two seeded Gaussian clusters with centres `separation * stddev` apart
/// along a random direction. Labels are 0 for the first `per_cluster` rows.
struct Clusters {
  Matrix x;
  std::vector<int> labels;
};

inline Clusters gaussian_clusters(std::uint64_t seed, std::size_t per_cluster, std::size_t dim,
                                  double separation, double stddev = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> direction(dim);
  double norm = 0.0;
  for (double& d : direction) {
    d = gauss(rng);
    norm += d * d;
  }
  norm = std::sqrt(norm);
  Clusters c{Matrix(2 * per_cluster, dim), {}};
  for (std::size_t i = 0; i < 2 * per_cluster; ++i) {
    const int label = i < per_cluster ? 0 : 1;
    c.labels.push_back(label);
    const double offset = (label == 0 ? -0.5 : 0.5) * separation * stddev;
    for (std::size_t d = 0; d < dim; ++d) {
      c.x(i, d) = offset * direction[d] / norm + stddev * gauss(rng);
    }
  }
  return c;
}

/// Fraction of rows whose nearest other row (Euclidean) has the same label.
inline double same_label_nn_fraction(const Matrix& y, const std::vector<int>& labels) {
  std::size_t agree = 0;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double best = INFINITY;
    std::size_t best_j = i;
    for (std::size_t j = 0; j < y.rows(); ++j) {
      if (j == i) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < y.cols(); ++k) d += (y(i, k) - y(j, k)) * (y(i, k) - y(j, k));
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    agree += labels[best_j] == labels[i];
  }
  return static_cast<double>(agree) / static_cast<double>(y.rows());
}

// t-SNE references. They recompute everything from scratch in double.

inline Matrix naive_distances(const Matrix& x) {
  Matrix d(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) s += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
      d(i, j) = s;
    }
  }
  return d;
}

inline Matrix naive_q(const Matrix& y) {
  const std::size_t n = y.rows();
  Matrix q(n, n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < y.cols(); ++k) d += (y(i, k) - y(j, k)) * (y(i, k) - y(j, k));
      q(i, j) = 1.0 / (1.0 + d);
      z += q(i, j);
    }
  }
  for (double& v : q.data()) v /= z;
  return q;
}

inline double naive_kl(const Matrix& p, const Matrix& q) {
  double kl = 0.0;
  for (std::size_t k = 0; k < p.data().size(); ++k) {
    const double pk = p.data()[k];
    if (pk > 0.0) kl += pk * std::log(pk / std::max(q.data()[k], tsne::kProbabilityFloor));
  }
  return kl;
}

/// Random symmetric joint distribution with zero diagonal.
inline Matrix random_p(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Matrix p(n, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      p(i, j) = p(j, i) = u(rng);
      total += 2.0 * p(i, j);
    }
  }
  for (double& v : p.data()) v /= total;
  return p;
}

/// Central-difference gradient of naive_kl(p, naive_q(y)).
inline Matrix numeric_gradient(const Matrix& p, Matrix y, double h) {
  Matrix g(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t k = 0; k < y.cols(); ++k) {
      const double saved = y(i, k);
      y(i, k) = saved + h;
      const double plus = naive_kl(p, naive_q(y));
      y(i, k) = saved - h;
      const double minus = naive_kl(p, naive_q(y));
      y(i, k) = saved;
      g(i, k) = (plus - minus) / (2.0 * h);
    }
  }
  return g;
}

/// Recomputes p(j|i) from a bandwidth with the same flooring rule.
inline std::vector<double> conditional_row(const Matrix& d, std::size_t i, double sigma) {
  std::vector<double> row(d.rows(), 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < d.rows(); ++j) {
    if (j == i) continue;
    row[j] = std::exp(-d(i, j) / (2.0 * sigma * sigma));
    sum += row[j];
  }
  double kept = 0.0;
  for (double& v : row) {
    v /= sum;
    if (v < tsne::kProbabilityFloor) v = 0.0;
    kept += v;
  }
  for (double& v : row) v /= kept;
  return row;
}

inline double log2_perplexity(const std::vector<double>& row) {
  double h = 0.0;
  for (double v : row) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace wordmap::testing
