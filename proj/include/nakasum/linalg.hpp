#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nakasum {

// Dense row-major square matrix. Sizes here are tiny (L <= ~16).
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t dim() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }

  Matrix operator*(const Matrix& rhs) const;
  Matrix transposed() const;
  double max_abs() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Slack for eigenvalues of "PSD" matrices estimated from data.
inline constexpr double kPsdSlack = 1e-10;

// Matrix of square roots of power correlation coefficients: symmetric, unit
// diagonal, entries in [0, 1], positive semidefinite within kPsdSlack.
class CorrelationMatrix {
 public:
  // Validates and throws ValidationError on any violated invariant.
  explicit CorrelationMatrix(Matrix m);

  static CorrelationMatrix identity(std::size_t n);
  // Every off-diagonal entry equal to sqrt(rho).
  static CorrelationMatrix equal(std::size_t n, double rho);
  // Entry (i, j) equal to sqrt(rho)^{|i-j|}, i.e. rho_ij = rho^{|i-j|}.
  static CorrelationMatrix exponential(std::size_t n, double rho);

  std::size_t dim() const { return m_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

  friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;

 private:
  Matrix m_;
};

// Eigenvalues in descending order.
struct EigenSpectrum {
  std::vector<double> values;

  double sum() const;
  double sum_squares() const;
  double product() const;
};

// Cyclic Jacobi rotations; tiny negative eigenvalues are clamped to zero.
EigenSpectrum eigenvalues_sym(const CorrelationMatrix& m);
// Same solver on a general symmetric matrix, no clamping.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

// LU with partial pivoting.
double determinant(const Matrix& m);
Matrix inverse(const Matrix& m);

// Inverse of the principal submatrix selected by `idx` (size 3 or 4,
// strictly increasing).
Matrix principal_submatrix_inverse(const CorrelationMatrix& m,
                                   std::span<const std::size_t> idx);

struct GreensFit {
  CorrelationMatrix matrix;
  // Adjacent-link coefficients t_k with c_ij = prod_{k=i}^{j-1} t_k.
  std::vector<double> links;
  // Set when some optimal t_k fell outside [0, 1] and was clamped.
  bool clamped = false;
};

// Least-squares Green's (Markov product) approximation of `m`:
// minimizes ||C(t) - m||_F by cyclic coordinate descent over the links.
GreensFit greens_fit(const CorrelationMatrix& m);

// Lower-triangular factor with L L^T = m. Rank-deficient PSD inputs produce
// zero columns where the pivot vanishes.
Matrix cholesky_psd(const CorrelationMatrix& m);

}  // namespace nakasum
