#include "nakasum/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nakasum/errors.hpp"
#include "nakasum/specfun.hpp"

namespace nakasum {

GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw ValidationError("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      dp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / dp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

GaussRule gauss_laguerre_normalized(std::size_t n, double alpha) {
  if (n == 0) throw ValidationError("gauss_laguerre: n must be >= 1");
  if (!(alpha > -1.0)) throw DomainError("gauss_laguerre: alpha must be > -1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  // ln(Gamma(alpha + n) / (Gamma(n) Gamma(alpha + 1))).
  const double log_norm =
      ln_gamma(alpha + nd) - ln_gamma(nd) - ln_gamma(alpha + 1.0);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Initial guesses follow the classic recurrence-based heuristics.
    if (i == 0) {
      z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nd + 1.8 * alpha);
    } else if (i == 1) {
      z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nd);
    } else {
      const double ai = static_cast<double>(i - 1);
      z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) *
           (z - rule.nodes[i - 2]) / (1.0 + 0.3 * alpha);
    }
    double p1 = 0.0;
    double p2 = 0.0;
    double pp = 0.0;
    double log_scale = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      p1 = 1.0;
      p2 = 0.0;
      log_scale = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0 + alpha - z) * p2 - (jd - 1.0 + alpha) * p3) / jd;
        // L_n grows like e^{z/2} at the outer nodes; rescale to stay finite.
        if (std::fabs(p1) > 1e150) {
          p1 *= 1e-150;
          p2 *= 1e-150;
          log_scale += 150.0 * std::numbers::ln10;
        }
      }
      pp = (nd * p1 - (nd + alpha) * p2) / z;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    rule.nodes[i] = z;
    // w_i = -Gamma(n + alpha) / (Gamma(n) n pp p2), normalized by
    // Gamma(alpha + 1). Work in logs to survive large n.
    const double denom = nd * pp * p2;
    rule.weights[i] = -std::copysign(1.0, denom) *
                      std::exp(log_norm - std::log(std::fabs(denom)) - 2.0 * log_scale);
  }
  return rule;
}

void WynnEpsilon::push(double partial_sum) { sums_.push_back(partial_sum); }

WynnEpsilon::Estimate WynnEpsilon::estimate(std::size_t window) const {
  if (sums_.empty()) return {};
  const std::size_t n = std::min(window, sums_.size());
  std::vector<double> prev(n + 1, 0.0);
  std::vector<double> cur(sums_.end() - static_cast<std::ptrdiff_t>(n),
                          sums_.end());
  Estimate best{cur.back(), n > 1 ? std::fabs(cur[n - 1] - cur[n - 2])
                                  : std::numeric_limits<double>::infinity()};
  double last_even = cur.back();
  bool have_even = false;
  for (std::size_t k = 1; cur.size() > 1; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0) {
        // The column has converged exactly.
        return (k % 2 == 1) ? Estimate{cur[i + 1], 0.0} : best;
      }
      next[i] = prev[i + 1] + 1.0 / d;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) {
      const double v = cur.back();
      if (!std::isfinite(v)) break;
      const double err = std::fabs(v - last_even);
      if (!have_even || err <= best.error) {
        best = {v, err};
      }
      last_even = v;
      have_even = true;
    }
  }
  return best;
}

void QuadratureControl::validate() const {
  if (!(abs_tol > 0.0)) throw ValidationError("QuadratureControl: abs_tol must be > 0");
  if (panel_nodes < 1) throw ValidationError("QuadratureControl: panel_nodes must be >= 1");
  if (max_panels < 1) throw ValidationError("QuadratureControl: max_panels must be >= 1");
}

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, std::size_t panels, const GaussRule& rule) {
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    total += 0.5 * h * acc;
  }
  return total;
}

OscillatoryResult integrate_oscillatory(
    const std::function<double(double)>& f,
    const std::function<double(double)>& envelope, double half_period,
    double inner_scale, double tol, const QuadratureControl& ctrl) {
  ctrl.validate();
  if (!(half_period > 0.0) || !(inner_scale > 0.0)) {
    throw ValidationError("integrate_oscillatory: scales must be positive");
  }
  const GaussRule rule = gauss_legendre(ctrl.panel_nodes);
  // Over the first half-period the kernel turns by less than pi, so panels
  // may grow geometrically once past the inner scale.
  double sum = 0.0;
  double t = 0.0;
  std::size_t used = 0;
  while (t < half_period) {
    const double width = std::min(std::max(inner_scale, 0.5 * t), half_period - t);
    sum += integrate_panels(f, t, t + width, 1, rule);
    t = (half_period - t - width <= 1e-15 * half_period) ? half_period : t + width;
    if (++used >= ctrl.max_panels) {
      throw AccuracyError("integrate_oscillatory: first half-period needs too many panels",
                          sum, std::numeric_limits<double>::quiet_NaN());
    }
    // Envelopes decaying faster than 1/t leave a tail below envelope(t) t.
    if (envelope(t) * t < 1e-3 * tol) return {sum, envelope(t) * t, used};
  }
  WynnEpsilon wynn;
  wynn.push(sum);
  double last = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  while (used < ctrl.max_panels) {
    sum += integrate_panels(f, t, t + half_period, 1, rule);
    t += half_period;
    ++used;
    wynn.push(sum);
    // The tail is bounded by the envelope over a few half-periods.
    if (envelope(t) * half_period < 1e-3 * tol) {
      return {sum, envelope(t) * half_period, used};
    }
    if (wynn.size() >= 6 && wynn.size() % 2 == 0) {
      const auto est = wynn.estimate();
      if (!std::isnan(last) && std::fabs(est.value - last) <= 1e-3 * tol &&
          est.error <= tol) {
        if (++stable == 2) return {est.value, std::fabs(est.value - last), used};
      } else {
        stable = 0;
      }
      last = est.value;
    }
  }
  const auto est = wynn.estimate();
  throw AccuracyError("integrate_oscillatory: tolerance not reached within max_panels",
                      est.value, last);
}

}  // namespace nakasum
