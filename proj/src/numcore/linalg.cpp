#include "sphlab/numcore/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphlab/errors.hpp"

namespace sphlab {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

namespace {

// Householder factorization kept in column-major form. Reflector j is
// I - beta_j v_j v_j^T with v_j zero above row j.
struct Householder {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> reflectors;  // cols vectors of length rows
  std::vector<double> betas;
  std::vector<double> r_diag;

  std::span<const double> v(std::size_t j) const { return {reflectors.data() + j * rows, rows}; }

  // x <- H_0 H_1 ... H_{cols-1} x
  void apply_q(std::span<double> x) const {
    for (std::size_t jj = cols; jj-- > 0;) {
      const auto vj = v(jj);
      double s = 0.0;
      for (std::size_t i = jj; i < rows; ++i) s += vj[i] * x[i];
      s *= betas[jj];
      if (s == 0.0) continue;
      for (std::size_t i = jj; i < rows; ++i) x[i] -= s * vj[i];
    }
  }
};

Householder householder(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (cols == 0 || rows < cols) throw DomainError("orthonormalize: need rows >= cols >= 1");
  if (!m.all_finite()) throw DomainError("orthonormalize: non-finite entries");

  // Column-major working copy.
  std::vector<double> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[j * rows + i] = m(i, j);

  double largest_col = 0.0;
  for (std::size_t j = 0; j < cols; ++j)
    largest_col = std::max(largest_col, norm(std::span<const double>(a.data() + j * rows, rows)));

  Householder h;
  h.rows = rows;
  h.cols = cols;
  h.reflectors.assign(rows * cols, 0.0);
  h.betas.assign(cols, 0.0);
  h.r_diag.assign(cols, 0.0);

  for (std::size_t j = 0; j < cols; ++j) {
    double* x = a.data() + j * rows;
    double sigma = 0.0;
    for (std::size_t i = j; i < rows; ++i) sigma += x[i] * x[i];
    const double xnorm = std::sqrt(sigma);
    if (!(xnorm > 1e-12 * largest_col)) {
      throw DegenerateInput("orthonormalize: input is rank deficient at column " + std::to_string(j));
    }
    const double alpha = x[j] >= 0.0 ? -xnorm : xnorm;
    double* vj = h.reflectors.data() + j * rows;
    for (std::size_t i = j; i < rows; ++i) vj[i] = x[i];
    vj[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < rows; ++i) vnorm2 += vj[i] * vj[i];
    const double beta = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
    h.betas[j] = beta;
    h.r_diag[j] = alpha;

    for (std::size_t c = j + 1; c < cols; ++c) {
      double* y = a.data() + c * rows;
      double s = 0.0;
      for (std::size_t i = j; i < rows; ++i) s += vj[i] * y[i];
      s *= beta;
      for (std::size_t i = j; i < rows; ++i) y[i] -= s * vj[i];
    }
  }
  return h;
}

}  // namespace

Matrix orthonormalize(const Matrix& m) {
  const Householder h = householder(m);
  Matrix q(h.rows, h.cols);
  std::vector<double> e(h.rows);
  for (std::size_t j = 0; j < h.cols; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    h.apply_q(e);
    // R_jj = alpha_j; flip so that the effective diagonal is positive.
    const double sign = h.r_diag[j] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < h.rows; ++i) q(i, j) = sign * e[i];
  }
  return q;
}

Matrix complement_basis(const Matrix& basis) {
  const std::size_t n = basis.rows();
  const std::size_t d = basis.cols();
  if (d == n) return Matrix(n, 0);
  const Householder h = householder(basis);
  Matrix out(n, n - d);
  std::vector<double> e(n);
  for (std::size_t j = d; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    h.apply_q(e);
    for (std::size_t i = 0; i < n; ++i) out(i, j - d) = e[i];
  }
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& s) {
  const std::size_t k = s.rows();
  if (s.cols() != k) throw DomainError("symmetric_eigen: matrix is not square");
  if (!s.all_finite()) throw DomainError("symmetric_eigen: non-finite entries");
  const double scale = max_abs(s);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale)
        throw DomainError("symmetric_eigen: matrix is not symmetric");

  Matrix a = s;
  Matrix v = Matrix::identity(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) a(j, i) = a(i, j);

  double frob2 = 0.0;
  for (double x : a.data()) frob2 += x * x;
  const double target = 1e-30 * frob2;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) off += a(p, q) * a(p, q);
    if (off <= target) break;

    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - sn * arq;
          a(r, q) = sn * arp + c * arq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - sn * aqr;
          a(q, r) = sn * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - sn * vrq;
          v(r, q) = sn * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(k);
  out.vectors = Matrix(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < k; ++r) out.vectors(r, j) = v(r, order[j]);
  }
  return out;
}

std::vector<double> singular_values_small(const Matrix& m) {
  if (m.cols() > m.rows()) throw DomainError("singular_values_small: need cols <= rows");
  const Matrix gram = multiply_tn(m, m);
  std::vector<double> values = symmetric_eigen(gram).values;
  for (double& x : values) x = std::sqrt(std::max(x, 0.0));
  return values;
}

Matrix cholesky(const Matrix& s) {
  const std::size_t k = s.rows();
  if (s.cols() != k) throw DomainError("cholesky: matrix is not square");
  Matrix l(k, k);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < k; ++i) max_diag = std::max(max_diag, std::abs(s(i, i)));
  for (std::size_t j = 0; j < k; ++j) {
    double d = s(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 1e-14 * max_diag)) throw DegenerateInput("cholesky: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < k; ++i) {
      double x = s(i, j);
      for (std::size_t p = 0; p < j; ++p) x -= l(i, p) * l(j, p);
      l(i, j) = x / ljj;
    }
  }
  return l;
}

namespace {

// Solves L X = B in place for lower-triangular L.
void forward_solve(const Matrix& l, Matrix& b) {
  const std::size_t k = l.rows();
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < k; ++i) {
      double x = b(i, c);
      for (std::size_t p = 0; p < i; ++p) x -= l(i, p) * b(p, c);
      b(i, c) = x / l(i, i);
    }
  }
}

}  // namespace

std::vector<double> generalized_symmetric_eigenvalues(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DomainError("generalized_symmetric_eigenvalues: shape mismatch");
  const Matrix l = cholesky(b);
  Matrix x = a;
  forward_solve(l, x);        // L^{-1} A
  Matrix c = x.transpose();   // A L^{-T}
  forward_solve(l, c);        // L^{-1} A L^{-T}
  const std::size_t k = c.rows();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double avg = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = avg;
      c(j, i) = avg;
    }
  return symmetric_eigen(c).values;
}

}  // namespace sphlab
