#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nakasum/linalg.hpp"
#include "nakasum/specfun.hpp"

namespace nakasum {

struct EqualCorrelation {
  double rho = 0.0;
};
struct ExponentialCorrelation {
  double rho = 0.0;
};
struct ArbitraryCorrelation {
  CorrelationMatrix matrix;
};
using CorrelationModel =
    std::variant<EqualCorrelation, ExponentialCorrelation, ArbitraryCorrelation>;

// L correlated Nakagami-m envelopes with a shared integer fading parameter.
struct EnsembleSpec {
  int fading_m = 1;
  std::vector<double> powers;  // Omega_k, linear units
  CorrelationModel correlation = EqualCorrelation{};

  std::size_t branch_count() const { return powers.size(); }
  void validate() const;
};

// The physical correlation matrix Lambda of sqrt(rho_ij).
CorrelationMatrix correlation_matrix(const EnsembleSpec& spec);
// Matrix used by the approximation: the Green's fit for arbitrary
// correlation, Lambda itself otherwise.
CorrelationMatrix model_matrix(const EnsembleSpec& spec);
// True when every pair is fully correlated (rho_ij = 1).
bool is_maximally_correlated(const EnsembleSpec& spec);

struct MomentPair {
  double m2 = 0.0;  // E[Z^2]
  double m4 = 0.0;  // E[Z^4]
};

double second_moment_Z(const EnsembleSpec& spec);
double fourth_moment_Z(const EnsembleSpec& spec);
// Both moments. Non-fatal numerical notes (e.g. F_A evaluated near its
// convergence boundary, clamped Green's links) are appended to `warnings`.
MomentPair moments_Z(const EnsembleSpec& spec,
                     std::vector<std::string>* warnings = nullptr);

// W(k_1..k_N) for equal correlation. Orders (2,1,1) use the closed
// reduction; everything else goes through F_A.
double w_coefficient(std::span<const int> orders, int m_z, double rho);
// Always the F_A route.
double w_coefficient_lauricella(std::span<const int> orders, int m_z, double rho,
                                bool* near_boundary = nullptr);

// J(m, a, p, q) = (1+a)^{p/2} ((1+2a)/(1+a))^{q/2}
//                 2F1(m + p/2, -q/2; m; -a^2/(1+2a)).
double j_identity(double m, double a, double p, double q);

// W(2,1,1) in terms of J functions.
double w211_reduced(int m_z, double rho);

// Unit-power joint moments for envelopes whose correlation submatrix has a
// tridiagonal inverse. `delta` is that 3x3 inverse; (n1, n2, n3) is one of
// (2,1,1), (1,2,1), (1,1,2).
double joint_moment_triple(int n1, int n2, int n3, const Matrix& delta, int m_z,
                           const SeriesControl& ctrl = {1e-12, 10000});
// E[Z_m Z_n Z_i Z_j] from the 4x4 tridiagonal inverse `psi`.
double joint_moment_quad(const Matrix& psi, int m_z,
                         const SeriesControl& ctrl = {1e-12, 10000});

}  // namespace nakasum
