#pragma once

#include <cstddef>
#include <span>

namespace nakasum {

// Truncation policy shared by every infinite series in the library.
struct SeriesControl {
  double rel_tol = 1e-12;
  std::size_t max_terms = 100000;

  void validate() const;
};

// ln Gamma(x) for x > 0 (Lanczos, g = 607/128).
double ln_gamma(double x);

// Gauss hypergeometric 2F1(a, b; c; x) for x < 1 (x < -1/2 through the Pfaff
// transformation), or x = 1 when c - a - b > 0 (Gauss summation).
double gauss_2f1(double a, double b, double c, double x,
                 const SeriesControl& ctrl = {});

// Kummer confluent hypergeometric 1F1(a; c; x).
double kummer_1f1(double a, double c, double x,
                  const SeriesControl& ctrl = {});

struct LauricellaResult {
  double value = 0.0;
  // Set when the arguments sit close to the boundary sum(x) = 1 of the
  // convergence region, or the quadrature only reached sqrt(rel_tol).
  bool near_boundary = false;
  std::size_t nodes = 0;
};

// Lauricella F_A of N variables through its Laplace-type integral
//   F_A = 1/Gamma(a) int_0^inf t^{a-1} e^{-t} prod_i 1F1(b_i; c_i; x_i t) dt,
// evaluated with generalized Gauss-Laguerre rules of doubling size.
LauricellaResult lauricella_fa(double a, std::span<const double> b,
                               std::span<const double> c,
                               std::span<const double> x,
                               const SeriesControl& ctrl = {});

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the standard normal distribution.
double normal_q(double x);

}  // namespace nakasum
