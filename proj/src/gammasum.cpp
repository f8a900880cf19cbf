#include "nakasum/gammasum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nakasum/errors.hpp"
#include "nakasum/specfun.hpp"

namespace nakasum {

namespace {

using std::numbers::pi;

// Characteristic function of R^2 in polar form:
// phi(t) = envelope(t) exp(i phase(t)).
struct CharFn {
  std::vector<double> scales;
  double m = 1.0;

  explicit CharFn(const GammaSumModel& model) : scales(model.gamma_scales()), m(model.m_r) {
    if (scales.empty() || !(m > 0.0)) {
      throw ValidationError("gamma-sum model has no positive eigenvalue or m_R <= 0");
    }
  }

  double phase(double t) const {
    double a = 0.0;
    for (double c : scales) a += std::atan(t * c);
    return m * a;
  }
  double envelope(double t) const {
    double a = 0.0;
    for (double c : scales) a += std::log1p((t * c) * (t * c));
    return std::exp(-0.5 * m * a);
  }
  double mean() const {
    double a = 0.0;
    for (double c : scales) a += c;
    return m * a;
  }
  double max_scale() const { return *std::max_element(scales.begin(), scales.end()); }
};

}  // namespace

double mgf(const GammaSumModel& model, double s) {
  const auto scales = model.gamma_scales();
  double a = 0.0;
  for (double c : scales) {
    if (!(s * c < 1.0)) throw DomainError("mgf: s must lie left of the pole 1 / max scale");
    a += std::log1p(-s * c);
  }
  return std::exp(-model.m_r * a);
}

double pdf(const GammaSumModel& model, double r, const QuadratureControl& ctrl) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("pdf: r must be positive");
  ctrl.validate();
  const CharFn cf(model);
  const double y = r * r;
  const auto f = [&](double t) { return std::cos(cf.phase(t) - t * y) * cf.envelope(t); };
  const auto env = [&](double t) { return cf.envelope(t); };
  const double scale = 2.0 * r / pi;
  const auto res = integrate_oscillatory(f, env, pi / y, pi / std::max(y, cf.mean()),
                                         ctrl.abs_tol / scale, ctrl);
  return scale * res.value;
}

double pdf_equal_corr(const GammaSumModel& model, double rho, double r) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("pdf_equal_corr: rho must lie in [0, 1)");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("pdf_equal_corr: r must be positive");
  const double m = model.m_r;
  const double om = model.omega_r;
  const double l = static_cast<double>(model.branch_count);
  const double s = std::sqrt(rho);
  const double lam1 = 1.0 + (l - 1.0) * s;
  const double y = r * r;
  // exp(-A y) 1F1(m; mL; B y) = exp(-(A - B) y) 1F1(m(L-1); mL; -B y).
  const double b = m * l * s / ((1.0 - s) * lam1 * om);
  const double a_minus_b = m / (lam1 * om);
  double log_pre = std::log(2.0) + m * l * std::log(m / om) +
                   (2.0 * m * l - 1.0) * std::log(r) - ln_gamma(m * l) -
                   m * std::log(lam1) - a_minus_b * y;
  if (l > 1.0) log_pre -= m * (l - 1.0) * std::log1p(-s);
  return std::exp(log_pre) * kummer_1f1(m * (l - 1.0), m * l, -b * y);
}

double cdf(const GammaSumModel& model, double t, const QuadratureControl& ctrl) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("cdf: t must be positive");
  ctrl.validate();
  const CharFn cf(model);
  const auto f = [&](double x) {
    return std::sin(cf.phase(x) - x * t) * cf.envelope(x) / x;
  };
  const auto env = [&](double x) { return cf.envelope(x) / x; };
  const auto res = integrate_oscillatory(f, env, pi / t, pi / std::max(t, cf.mean()),
                                         ctrl.abs_tol * pi, ctrl);
  return std::clamp(0.5 - res.value / pi, 0.0, 1.0);
}

EnvelopeTable::EnvelopeTable(const GammaSumModel& model, std::size_t points,
                             const QuadratureControl& ctrl) {
  if (points < 16) throw ValidationError("EnvelopeTable: need at least 16 points");
  const CharFn cf(model);
  // R^2 is stochastically below c_max Gamma(m K, 1).
  const double shape = cf.m * static_cast<double>(cf.scales.size());
  double y = std::max(cf.mean(), cf.max_scale());
  while (gamma_q(shape, y / cf.max_scale()) > 1e-15) y *= 1.25;
  const double r_max = std::sqrt(y);

  r_.resize(points);
  f_.resize(points);
  d_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(points - 1);
    r_[i] = r;
    if (i == 0) {
      f_[i] = 0.0;
      d_[i] = 0.0;
      continue;
    }
    f_[i] = std::max(f_[i - 1], nakasum::cdf(model, r * r, ctrl));
    d_[i] = std::max(0.0, nakasum::pdf(model, r, ctrl));
  }
}

double EnvelopeTable::cdf(double r) const {
  if (std::isnan(r)) throw ValidationError("EnvelopeTable: NaN argument");
  if (r <= 0.0) return 0.0;
  if (r >= r_.back()) return 1.0;
  const double h = r_[1] - r_[0];
  const std::size_t i = std::min(static_cast<std::size_t>(r / h), r_.size() - 2);
  const double u = (r - r_[i]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double v = (2 * u3 - 3 * u2 + 1) * f_[i] + (u3 - 2 * u2 + u) * h * d_[i] +
                   (-2 * u3 + 3 * u2) * f_[i + 1] + (u3 - u2) * h * d_[i + 1];
  return std::clamp(v, 0.0, 1.0);
}

double EnvelopeTable::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("EnvelopeTable: p must lie in [0, 1]");
  if (p <= 0.0) return 0.0;
  if (p >= f_.back()) return r_.back();
  const auto it = std::upper_bound(f_.begin(), f_.end(), p);
  const std::size_t hi = static_cast<std::size_t>(it - f_.begin());
  double a = r_[hi - 1];
  double b = r_[hi];
  for (int k = 0; k < 60 && b - a > 1e-15 * b; ++k) {
    const double mid = 0.5 * (a + b);
    if (cdf(mid) < p) a = mid; else b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace nakasum
