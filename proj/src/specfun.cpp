#include "nakasum/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "nakasum/errors.hpp"
#include "nakasum/quadrature.hpp"

namespace nakasum {

namespace {

constexpr double kPi = std::numbers::pi;

// Godfrey's coefficients for g = 607/128, n = 15.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,
    .15808870322491248884e-3,   -.21026444172410488319e-3,
    .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,
    .36899182659531622704e-5};

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

// log|Gamma(x)| and sign of Gamma(x) for any non-pole real x.
struct SignedLogGamma {
  double log_abs;
  double sign;
};

SignedLogGamma signed_ln_gamma(double x) {
  if (x > 0.0) return {ln_gamma(x), 1.0};
  if (is_nonpositive_integer(x)) {
    throw DomainError("Gamma has a pole at " + std::to_string(x));
  }
  // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
  const double s = std::sin(kPi * x);
  return {std::log(kPi / std::fabs(s)) - ln_gamma(1.0 - x), s > 0 ? 1.0 : -1.0};
}

// Sums sum_n term_n with term_{n+1} = term_n * ratio(n). Stops after three
// consecutive terms below rel_tol relative to the partial sum, once the
// geometric tail bound |term| r / (1 - r) is below it as well.
template <class Ratio>
double sum_series(Ratio ratio, const SeriesControl& ctrl, const char* name) {
  double term = 1.0;
  double sum = 1.0;
  int quiet = 0;
  for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
    const double r = ratio(static_cast<double>(n));
    term *= r;
    sum += term;
    if (!std::isfinite(sum)) {
      throw TruncationError(std::string(name) + ": series overflow", sum);
    }
    const double ar = std::fabs(r);
    const double tail = ar < 1.0 ? std::fabs(term) * std::max(1.0, ar / (1.0 - ar))
                                 : std::fabs(term);
    if (tail <= ctrl.rel_tol * std::fabs(sum)) {
      if (++quiet == 3) return sum;
    } else {
      quiet = 0;
    }
  }
  throw TruncationError(std::string(name) + ": no convergence within " +
                            std::to_string(ctrl.max_terms) + " terms",
                        sum);
}

double series_1f1(double a, double c, double x, const SeriesControl& ctrl) {
  return sum_series(
      [&](double n) { return (a + n) / ((c + n) * (n + 1.0)) * x; }, ctrl,
      "kummer_1f1");
}

// Asymptotic expansion for x -> -inf (valid when c - a is not a
// non-positive integer):
//   1F1(a;c;x) ~ Gamma(c)/Gamma(c-a) w^{-a} sum_s (a)_s (a-c+1)_s / (s! w^s),
// with w = -x.
double asymptotic_negative_1f1(double a, double c, double x,
                               const SeriesControl& ctrl) {
  const double w = -x;
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < ctrl.max_terms; ++s) {
    const double sd = static_cast<double>(s);
    term *= (a + sd) * (a - c + 1.0 + sd) / ((sd + 1.0) * w);
    if (std::fabs(term) > last) break;  // divergent tail starts
    sum += term;
    last = std::fabs(term);
    if (last <= ctrl.rel_tol * std::fabs(sum) || term == 0.0) break;
  }
  const auto gc = signed_ln_gamma(c);
  const auto gca = signed_ln_gamma(c - a);
  return gc.sign * gca.sign *
         std::exp(gc.log_abs - gca.log_abs - a * std::log(w)) * sum;
}

// Leading asymptotic term for x -> +inf:
//   1F1(a;c;x) ~ Gamma(c)/Gamma(a) e^x x^{a-c} sum_s (c-a)_s (1-a)_s/(s! x^s).
double asymptotic_positive_1f1(double a, double c, double x,
                               const SeriesControl& ctrl) {
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < ctrl.max_terms; ++s) {
    const double sd = static_cast<double>(s);
    term *= (c - a + sd) * (1.0 - a + sd) / ((sd + 1.0) * x);
    if (std::fabs(term) > last) break;
    sum += term;
    last = std::fabs(term);
    if (last <= ctrl.rel_tol * std::fabs(sum) || term == 0.0) break;
  }
  const auto gc = signed_ln_gamma(c);
  const auto ga = signed_ln_gamma(a);
  return gc.sign * ga.sign *
         std::exp(gc.log_abs - ga.log_abs + x + (a - c) * std::log(x)) * sum;
}

// Beyond this magnitude the convergent series would overflow or lose all
// digits, and the asymptotic expansions are accurate to machine precision.
constexpr double kAsymptoticThreshold = 600.0;

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0)) throw ValidationError("SeriesControl: rel_tol must be > 0");
  if (max_terms < 1) throw ValidationError("SeriesControl: max_terms must be >= 1");
}

double ln_gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("ln_gamma: argument must be positive, got " +
                      std::to_string(x));
  }
  if (x < 0.5) {
    // Gamma(x) = Gamma(x + 1) / x keeps the Lanczos sum in its best range.
    return ln_gamma(x + 1.0) - std::log(x);
  }
  const double z = x - 1.0;
  double acc = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    acc += kLanczos[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t +
         std::log(acc);
}

double gauss_2f1(double a, double b, double c, double x,
                 const SeriesControl& ctrl) {
  ctrl.validate();
  if (is_nonpositive_integer(c)) {
    throw DomainError("gauss_2f1: c must not be a non-positive integer");
  }
  if (x == 0.0 || a == 0.0 || b == 0.0) return 1.0;
  if (x == 1.0) {
    const double s = c - a - b;
    if (!(s > 0.0)) {
      throw DivergenceError("gauss_2f1: divergent at x = 1 (c - a - b <= 0)");
    }
    if (is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b)) {
      return 0.0;
    }
    const auto g1 = signed_ln_gamma(c);
    const auto g2 = signed_ln_gamma(s);
    const auto g3 = signed_ln_gamma(c - a);
    const auto g4 = signed_ln_gamma(c - b);
    return g1.sign * g2.sign * g3.sign * g4.sign *
           std::exp(g1.log_abs + g2.log_abs - g3.log_abs - g4.log_abs);
  }
  if (!(x < 1.0)) {
    throw DivergenceError("gauss_2f1: x must be < 1, got " + std::to_string(x));
  }
  if (x < -0.5) {
    // Pfaff: 2F1(a,b;c;x) = (1-x)^{-b} 2F1(c-a, b; c; x/(x-1)) maps the
    // whole negative axis into (0, 1). Keep a terminating parameter as b.
    if (is_nonpositive_integer(a) && !is_nonpositive_integer(b)) std::swap(a, b);
    return std::pow(1.0 - x, -b) * gauss_2f1(c - a, b, c, x / (x - 1.0), ctrl);
  }
  return sum_series(
      [&](double n) {
        return (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
      },
      ctrl, "gauss_2f1");
}

double kummer_1f1(double a, double c, double x, const SeriesControl& ctrl) {
  ctrl.validate();
  if (is_nonpositive_integer(c)) {
    throw DomainError("kummer_1f1: c must not be a non-positive integer");
  }
  if (x == 0.0 || a == 0.0) return 1.0;
  if (a == c) return std::exp(x);
  if (is_nonpositive_integer(a)) {
    // Terminating polynomial.
    return series_1f1(a, c, x, ctrl);
  }
  if (x > 0.0) {
    if (x <= kAsymptoticThreshold) return series_1f1(a, c, x, ctrl);
    return asymptotic_positive_1f1(a, c, x, ctrl);
  }
  // x < 0: Kummer's transformation 1F1(a;c;x) = e^x 1F1(c-a;c;-x) turns the
  // alternating series into one with positive terms once n > a - c.
  if (is_nonpositive_integer(c - a)) {
    return std::exp(x) * series_1f1(c - a, c, -x, ctrl);
  }
  if (-x <= kAsymptoticThreshold) {
    if (c - a > 0.0) return std::exp(x) * series_1f1(c - a, c, -x, ctrl);
    return series_1f1(a, c, x, ctrl);
  }
  return asymptotic_negative_1f1(a, c, x, ctrl);
}

LauricellaResult lauricella_fa(double a, std::span<const double> b,
                               std::span<const double> c,
                               std::span<const double> x,
                               const SeriesControl& ctrl) {
  ctrl.validate();
  if (b.size() != c.size() || b.size() != x.size() || b.empty()) {
    throw ValidationError("lauricella_fa: b, c, x must have equal nonzero length");
  }
  if (!(a > 0.0)) {
    throw DomainError("lauricella_fa: the Laplace route needs a > 0");
  }
  double abs_sum = 0.0;
  double sum = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_nonpositive_integer(c[i])) {
      throw DomainError("lauricella_fa: c_i must not be a non-positive integer");
    }
    abs_sum += std::fabs(x[i]);
    sum += x[i];
    all_zero = all_zero && x[i] == 0.0;
  }
  if (all_zero) return {1.0, false, 0};
  if (!(abs_sum < 1.0)) {
    throw DivergenceError("lauricella_fa: sum |x_i| must be < 1");
  }

  // prod 1F1(b_i; c_i; x_i t) = e^{S t} prod 1F1(c_i - b_i; c_i; -x_i t).
  // Substituting u = (1 - S) t leaves the Laguerre weight u^{a-1} e^{-u}.
  const double shrink = 1.0 - sum;
  const double prefactor = std::pow(shrink, -a);
  auto estimate = [&](std::size_t n) {
    const GaussRule rule = gauss_laguerre_normalized(n, a - 1.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double g = 1.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        g *= kummer_1f1(c[i] - b[i], c[i], -x[i] * rule.nodes[k] / shrink, ctrl);
      }
      acc += rule.weights[k] * g;
    }
    return prefactor * acc;
  };

  constexpr std::size_t kMaxNodes = 512;
  std::size_t n = 16;
  double prev = estimate(n);
  double prev_gap = std::numeric_limits<double>::infinity();
  const bool boundary = shrink < 0.05;
  while (n < kMaxNodes) {
    n *= 2;
    const double cur = estimate(n);
    const double gap = std::fabs(cur - prev);
    if (gap <= ctrl.rel_tol * std::fabs(cur)) return {cur, boundary, n};
    if (n == kMaxNodes) {
      // Close to sum(x) = 1 the integrand develops a kink near the origin and
      // the rules converge only algebraically: return the estimate, flagged.
      if (boundary || gap <= std::sqrt(ctrl.rel_tol) * std::fabs(cur)) {
        return {cur, true, n};
      }
      throw TruncationError("lauricella_fa: Gauss-Laguerre estimates did not settle",
                            cur);
    }
    // Once the rule is past its convergence region, rounding noise sets the
    // floor; accept when the gap stops shrinking at a tiny level.
    if (gap >= prev_gap && gap <= 1e3 * ctrl.rel_tol * std::fabs(cur)) {
      return {cur, boundary, n};
    }
    prev_gap = gap;
    prev = cur;
  }
  return {prev, true, n};
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p: a must be positive");
  if (x < 0.0) throw DomainError("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefix = a * std::log(x) - x - ln_gamma(a);
  if (x < a + 1.0) {
    // Power series.
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 100000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return std::min(1.0, sum * std::exp(log_prefix));
  }
  return 1.0 - gamma_q(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_q: a must be positive");
  if (x < 0.0) throw DomainError("gamma_q: x must be non-negative");
  if (x < a + 1.0) return 1.0 - gamma_p(a, x);
  if (std::isinf(x)) return 0.0;
  // Modified Lentz continued fraction.
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(a * std::log(x) - x - ln_gamma(a)) * h;
}

double normal_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace nakasum
