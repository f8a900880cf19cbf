#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nakasum {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(std::size_t n);

// n-point generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on
// [0, inf). Weights are divided by Gamma(alpha + 1), so they sum to one.
GaussRule gauss_laguerre_normalized(std::size_t n, double alpha);

// Wynn epsilon extrapolation of a sequence of partial sums.
class WynnEpsilon {
 public:
  struct Estimate {
    double value = 0.0;
    double error = 0.0;
  };

  void push(double partial_sum);
  std::size_t size() const { return sums_.size(); }
  // Uses at most the last `window` partial sums.
  Estimate estimate(std::size_t window = 30) const;

 private:
  std::vector<double> sums_;
};

// Panel quadrature control for the oscillatory inversion integrals.
struct QuadratureControl {
  double abs_tol = 1e-8;
  std::size_t panel_nodes = 64;
  std::size_t max_panels = 4096;

  void validate() const;
};

struct OscillatoryResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

// Integrates f over [0, inf) where f oscillates with half-period
// `half_period` for large arguments and varies on the scale `inner_scale`
// near the origin. The first half-period is covered by panels of width
// max(inner_scale, t/2); afterwards one panel per half-period is added and
// the partial sums are accelerated with the epsilon algorithm. `envelope(t)`
// bounds |f| on [t, inf) and lets the sum stop without extrapolation.
// Throws AccuracyError when `tol` is not met within ctrl.max_panels.
OscillatoryResult integrate_oscillatory(
    const std::function<double(double)>& f,
    const std::function<double(double)>& envelope, double half_period,
    double inner_scale, double tol, const QuadratureControl& ctrl);

// Fixed-panel composite Gauss-Legendre on [a, b].
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, std::size_t panels, const GaussRule& rule);

}  // namespace nakasum
