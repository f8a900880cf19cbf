#include "nakasum/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "nakasum/errors.hpp"

namespace nakasum {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_() {
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw ValidationError("Matrix: rows must form a square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (rhs.n_ != n_) throw ValidationError("Matrix: dimension mismatch");
  Matrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

namespace {

// Cyclic Jacobi sweeps until the off-diagonal norm is negligible.
std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.dim();
  double scale = 0.0;
  for (double v : a.data()) scale += v * v;
  scale = std::sqrt(scale);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

struct LuDecomposition {
  Matrix lu;
  std::vector<std::size_t> perm;
  double sign = 1.0;
  bool singular = false;
};

LuDecomposition lu_decompose(const Matrix& m) {
  const std::size_t n = m.dim();
  LuDecomposition out{m, std::vector<std::size_t>(n), 1.0, false};
  for (std::size_t i = 0; i < n; ++i) out.perm[i] = i;
  Matrix& a = out.lu;
  const double scale = std::max(m.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    if (std::fabs(a(piv, k)) <= 1e-14 * scale) {
      out.singular = true;
      a(piv, k) = 0.0;
      continue;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(out.perm[k], out.perm[piv]);
      out.sign = -out.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= a(i, k) * a(k, j);
    }
  }
  return out;
}

void validate_square_symmetric(const Matrix& m) {
  if (m.dim() == 0) throw ValidationError("correlation matrix must be non-empty");
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > 1e-12) {
        throw ValidationError("correlation matrix is not symmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
}

// Green's matrix with unit diagonal from adjacent links.
Matrix green_matrix(std::span<const double> links) {
  const std::size_t n = links.size() + 1;
  Matrix c = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      prod *= links[j - 1];
      c(i, j) = prod;
      c(j, i) = prod;
    }
  }
  return c;
}

double frobenius_gap(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      const double d = a(i, j) - b(i, j);
      s += d * d;
    }
  return s;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix m) : m_(std::move(m)) {
  validate_square_symmetric(m_);
  const std::size_t n = m_.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(m_(i, i) - 1.0) > 1e-12) {
      throw ValidationError("correlation matrix must have a unit diagonal");
    }
    m_(i, i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = m_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("correlation matrix entries must lie in [0, 1]");
      }
      m_(j, i) = m_(i, j) = 0.5 * (m_(i, j) + m_(j, i));
    }
  }
  const auto ev = jacobi_eigenvalues(m_);
  if (ev.back() < -kPsdSlack) {
    throw ValidationError("correlation matrix is not positive semidefinite "
                          "(smallest eigenvalue " + std::to_string(ev.back()) + ")");
  }
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) {
  return CorrelationMatrix(Matrix::identity(n));
}

CorrelationMatrix CorrelationMatrix::equal(std::size_t n, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in [0, 1]");
  Matrix m(n, std::sqrt(rho));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return CorrelationMatrix(std::move(m));
}

CorrelationMatrix CorrelationMatrix::exponential(std::size_t n, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in [0, 1]");
  if (n == 0) throw ValidationError("correlation matrix must be non-empty");
  return CorrelationMatrix(green_matrix(std::vector<double>(n - 1, std::sqrt(rho))));
}

double EigenSpectrum::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double EigenSpectrum::sum_squares() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

double EigenSpectrum::product() const {
  double p = 1.0;
  for (double v : values) p *= v;
  return p;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
  validate_square_symmetric(m);
  return jacobi_eigenvalues(m);
}

EigenSpectrum eigenvalues_sym(const CorrelationMatrix& m) {
  EigenSpectrum s{jacobi_eigenvalues(m.matrix())};
  for (double& v : s.values) {
    if (v < 0.0) v = 0.0;
  }
  return s;
}

double determinant(const Matrix& m) {
  const auto lu = lu_decompose(m);
  if (lu.singular) return 0.0;
  double det = lu.sign;
  for (std::size_t i = 0; i < m.dim(); ++i) det *= lu.lu(i, i);
  return det;
}

Matrix inverse(const Matrix& m) {
  const std::size_t n = m.dim();
  const auto lu = lu_decompose(m);
  if (lu.singular) throw SingularityError("matrix is singular");
  Matrix inv(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = (lu.perm[i] == col) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) v -= lu.lu(i, k) * x[k];
      x[i] = v;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double v = x[ii];
      for (std::size_t k = ii + 1; k < n; ++k) v -= lu.lu(ii, k) * x[k];
      x[ii] = v / lu.lu(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

Matrix principal_submatrix_inverse(const CorrelationMatrix& m,
                                   std::span<const std::size_t> idx) {
  if (idx.size() != 3 && idx.size() != 4) {
    throw ValidationError("principal_submatrix_inverse: index set must have size 3 or 4");
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= m.dim() || (k > 0 && idx[k] <= idx[k - 1])) {
      throw ValidationError("principal_submatrix_inverse: indices must be "
                            "strictly increasing and in range");
    }
  }
  Matrix sub(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = m(idx[i], idx[j]);
  return inverse(sub);
}

GreensFit greens_fit(const CorrelationMatrix& m) {
  const std::size_t n = m.dim();
  if (n <= 2) {
    std::vector<double> links;
    if (n == 2) links.push_back(m(0, 1));
    return {m, links, false};
  }
  const Matrix& target = m.matrix();
  std::vector<double> t(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) t[k] = target(k, k + 1);

  bool clamped = false;
  double prev = frobenius_gap(green_matrix(t), target);
  for (int sweep = 0; sweep < 100; ++sweep) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      // Every c_ij with i <= k < j is t_k times the product of the other
      // links, so the objective is quadratic in t_k.
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i <= k; ++i) {
        double left = 1.0;
        for (std::size_t q = i; q < k; ++q) left *= t[q];
        double right = 1.0;
        for (std::size_t j = k + 1; j < n; ++j) {
          if (j > k + 1) right *= t[j - 1];
          const double p = left * right;
          num += p * target(i, j);
          den += p * p;
        }
      }
      if (den == 0.0) continue;
      double opt = num / den;
      if (opt < 0.0 || opt > 1.0) {
        clamped = true;
        opt = std::clamp(opt, 0.0, 1.0);
      }
      t[k] = opt;
    }
    const double cur = frobenius_gap(green_matrix(t), target);
    const double improvement = prev - cur;
    prev = cur;
    if (improvement <= 1e-10 * std::max(prev, 1e-300)) break;
  }
  return {CorrelationMatrix(green_matrix(t)), std::move(t), clamped};
}

Matrix cholesky_psd(const CorrelationMatrix& m) {
  const std::size_t n = m.dim();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d < -kPsdSlack) {
      throw ValidationError("cholesky_psd: matrix is indefinite");
    }
    if (d <= kPsdSlack) {
      // Dependent column: the remaining entries must vanish too.
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = m(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
        if (std::fabs(v) > 1e-6) {
          throw ValidationError("cholesky_psd: matrix is indefinite");
        }
      }
      continue;
    }
    const double piv = std::sqrt(d);
    l(j, j) = piv;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = m(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / piv;
    }
  }
  return l;
}

}  // namespace nakasum
