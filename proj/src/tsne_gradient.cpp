#include "parallel.hpp"
#include "wordmap/error.hpp"
#include "wordmap/tsne.hpp"

namespace wordmap::tsne {

void gradient(const Matrix& p, double p_scale, const Matrix& q, const Matrix& numerators,
              const Matrix& y, Matrix& out, int num_threads) {
  const std::size_t n = y.rows();
  const std::size_t dims = y.cols();
  if (p.rows() != n || p.cols() != n || q.rows() != n || q.cols() != n ||
      numerators.rows() != n || numerators.cols() != n) {
    throw ValidationError("gradient: inconsistent matrix shapes");
  }
  if (out.rows() != n || out.cols() != dims) out = Matrix(n, dims);

  detail::parallel_for(n, num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto g = out.row(i);
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = (p_scale * p(i, j) - q(i, j)) * numerators(i, j);
        for (std::size_t k = 0; k < dims; ++k) g[k] += w * (y(i, k) - y(j, k));
      }
      for (double& v : g) v *= 4.0;
    }
  });
}

Matrix gradient(const Matrix& p, const Matrix& q, const Matrix& numerators, const Matrix& y,
                int num_threads) {
  Matrix out(y.rows(), y.cols());
  gradient(p, 1.0, q, numerators, y, out, num_threads);
  return out;
}

}  // namespace wordmap::tsne
