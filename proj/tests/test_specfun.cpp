#include <doctest.h>

#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>
#include <vector>

#include "nakasum/errors.hpp"
#include "nakasum/specfun.hpp"
#include "helpers.hpp"

using namespace nakasum;
using testutil::rel_err;

namespace {

// F_A with identical b, c and x in every variable, as the multi-series
// sum_n (a)_n/n! x^n sum_{|k|=n} n!/(k_1!..k_N!) prod (b)_{k_i}/(c)_{k_i},
// grouped by total order n. The inner sum is an N-fold binomial convolution
// of e_j = (b)_j/(c)_j x^j, done with log-factorial binomials.
double lauricella_equal_series(double a, double b, double c, double x, int nvar, int terms) {
  std::vector<double> lf(terms + 1, 0.0);
  for (int i = 1; i <= terms; ++i) lf[i] = lf[i - 1] + std::log(static_cast<double>(i));
  std::vector<double> e(terms, 0.0);
  double coef = 1.0;
  for (int j = 0; j < terms; ++j) {
    e[j] = coef;
    coef *= (b + j) / (c + j) * x;
  }
  std::vector<double> pw(e);
  for (int v = 1; v < nvar; ++v) {
    std::vector<double> next(terms, 0.0);
    for (int n = 0; n < terms; ++n)
      for (int i = 0; i <= n; ++i)
        next[n] += std::exp(lf[n] - lf[i] - lf[n - i]) * pw[i] * e[n - i];
    pw = next;
  }
  double sum = 0.0;
  double ratio = 1.0;  // (a)_n / n!
  for (int n = 0; n < terms; ++n) {
    sum += ratio * pw[n];
    ratio *= (a + n) / (n + 1.0);
  }
  return sum;
}

}  // namespace

TEST_CASE("ln_gamma spot values") {
  CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ln_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK(ln_gamma(7.0) == doctest::Approx(std::log(720.0)).epsilon(1e-14));
}

TEST_CASE("ln_gamma matches lgamma over [0.5, 1e6]") {
  double worst = 0.0;
  for (double x = 0.5; x < 1e6; x *= 1.37) {
    const double ref = boost::math::lgamma(x);
    const double err = std::fabs(ln_gamma(x) - ref) / std::max(1.0, std::fabs(ref));
    worst = std::max(worst, err);
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("ln_gamma rejects non-positive arguments") {
  CHECK_THROWS_AS(ln_gamma(0.0), DomainError);
  CHECK_THROWS_AS(ln_gamma(-2.5), DomainError);
}

TEST_CASE("gauss_2f1 spot values") {
  CHECK(gauss_2f1(-0.5, -0.5, 1.0, 0.0) == 1.0);
  CHECK(gauss_2f1(1.0, 1.0, 2.0, 0.5) == doctest::Approx(-std::log(0.5) / 0.5).epsilon(1e-13));
  CHECK(gauss_2f1(-0.5, -0.5, 1.0, 1.0) == doctest::Approx(4.0 / M_PI).epsilon(1e-13));
}

TEST_CASE("gauss_2f1 agrees with an independent pFq evaluation") {
  const std::array<std::array<double, 3>, 6> params{{{-0.5, -0.5, 1.0},
                                                     {-1.5, -0.5, 3.0},
                                                     {2.5, 1.5, 2.0},
                                                     {3.5, 4.0, 3.0},
                                                     {0.3, -1.7, 2.2},
                                                     {-1.0, -1.0, 2.0}}};
  for (const auto& p : params) {
    for (double x : {-0.9, -0.6, -0.3, 0.0, 0.25, 0.5, 0.8, 0.95}) {
      const double ref = boost::math::hypergeometric_pFq({p[0], p[1]}, {p[2]}, x);
      INFO("a=" << p[0] << " b=" << p[1] << " c=" << p[2] << " x=" << x);
      CHECK(rel_err(gauss_2f1(p[0], p[1], p[2], x), ref) < 1e-11);
    }
  }
}

TEST_CASE("gauss_2f1 is symmetric in a and b") {
  for (double x : {0.1, 0.6, 0.93}) {
    CHECK(gauss_2f1(-1.5, -0.5, 2.0, x) == gauss_2f1(-0.5, -1.5, 2.0, x));
    CHECK(gauss_2f1(3.5, 2.5, 3.0, x) == gauss_2f1(2.5, 3.5, 3.0, x));
  }
}

TEST_CASE("gauss_2f1 error paths") {
  CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, 2.0, 1.0), DivergenceError);
  CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, 2.0, 1.5), DivergenceError);
  CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, -2.0, 0.5), DomainError);
  try {
    gauss_2f1(2.5, 3.5, 3.0, 0.99, SeriesControl{1e-12, 5});
    FAIL("expected truncation");
  } catch (const TruncationError& e) {
    CHECK(e.partial() > 1.0);
  }
}

TEST_CASE("kummer_1f1 spot values") {
  CHECK(kummer_1f1(2.0, 3.0, 0.0) == 1.0);
  CHECK(kummer_1f1(1.7, 1.7, 2.5) == doctest::Approx(std::exp(2.5)).epsilon(1e-13));
  const double tight = kummer_1f1(1.5, 3.0, 4.0, SeriesControl{1e-15, 100000});
  double direct = 0.0;
  double term = 1.0;
  for (int k = 0; k < 200; ++k) {
    direct += term;
    term *= (1.5 + k) / (3.0 + k) * 4.0 / (k + 1.0);
  }
  CHECK(rel_err(tight, direct) < 1e-10);
}

TEST_CASE("kummer_1f1 agrees with an independent evaluation, including large arguments") {
  const std::array<std::array<double, 2>, 5> params{{{2.0, 10.0}, {3.0, 15.0}, {0.5, 2.0}, {4.0, 6.0}, {-0.5, 2.0}}};
  for (const auto& p : params) {
    for (double x : {-800.0, -120.0, -40.0, -3.0, 0.7, 5.0, 60.0, 300.0, 650.0}) {
      const double ref = boost::math::hypergeometric_1F1(p[0], p[1], x);
      INFO("a=" << p[0] << " c=" << p[1] << " x=" << x);
      CHECK(rel_err(kummer_1f1(p[0], p[1], x), ref) < 1e-10);
    }
  }
}

TEST_CASE("lauricella_fa degenerate cases") {
  const std::vector<double> b1{1.0};
  const std::vector<double> c1{2.0};
  const std::vector<double> x1{0.3};
  CHECK(lauricella_fa(1.0, b1, c1, x1).value ==
        doctest::Approx(-std::log(0.7) / 0.3).epsilon(1e-10));

  const std::vector<double> b3{2.5, 1.5, 1.5};
  const std::vector<double> c3{2.0, 2.0, 2.0};
  const std::vector<double> z3{0.0, 0.0, 0.0};
  CHECK(lauricella_fa(2.0, b3, c3, z3).value == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<double> b2{1.0, 1.0};
  const std::vector<double> x2{0.2, 0.3};
  CHECK(lauricella_fa(1.0, b2, b2, x2).value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("lauricella_fa with four variables matches the multi-series") {
  for (double s : {0.2, 0.5, 0.7}) {
    for (int m : {1, 2, 3}) {
      const double x = s / (1.0 + 3.0 * s);
      const std::vector<double> b(4, m + 0.5);
      const std::vector<double> c(4, m);
      const std::vector<double> xs(4, x);
      const auto fa = lauricella_fa(m, b, c, xs);
      const double ref = lauricella_equal_series(m, m + 0.5, m, x, 4, 900);
      INFO("sqrt(rho)=" << s << " m=" << m);
      CHECK(rel_err(fa.value, ref) < 1e-8);
    }
  }
}

TEST_CASE("lauricella_fa flags the convergence boundary and rejects divergence") {
  const std::vector<double> b(3, 1.5);
  const std::vector<double> c(3, 1.0);
  const double s = std::sqrt(0.99);
  const std::vector<double> near(3, s / (1.0 + 2.0 * s));
  CHECK(lauricella_fa(1.0, b, c, near).near_boundary);
  const std::vector<double> far(3, 0.4);
  CHECK_THROWS_AS(lauricella_fa(1.0, b, c, far), DivergenceError);
}

TEST_CASE("incomplete gamma functions") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 49.5}) {
    for (double x : {0.01, 0.5, 1.0, 3.0, 12.0, 60.0}) {
      const double p = boost::math::gamma_p(a, x);
      const double q = boost::math::gamma_q(a, x);
      INFO("a=" << a << " x=" << x);
      CHECK(std::fabs(gamma_p(a, x) - p) < 1e-13);
      if (q > 1e-280) CHECK(rel_err(gamma_q(a, x), q) < 1e-11);
    }
  }
  CHECK(normal_q(0.0) == doctest::Approx(0.5));
  CHECK(rel_err(normal_q(3.0), 0.5 * std::erfc(3.0 / std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("series control validation") {
  CHECK_THROWS_AS((SeriesControl{0.0, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((SeriesControl{1e-12, 0}.validate()), ValidationError);
}

TEST_CASE("special functions are pure") {
  const std::vector<double> b{2.5, 1.5, 1.5};
  const std::vector<double> c{2.0, 2.0, 2.0};
  const std::vector<double> x{0.2, 0.2, 0.2};
  CHECK(lauricella_fa(2.0, b, c, x).value == lauricella_fa(2.0, b, c, x).value);
  CHECK(gauss_2f1(-1.5, -0.5, 2.0, 0.7) == gauss_2f1(-1.5, -0.5, 2.0, 0.7));
  CHECK(kummer_1f1(3.0, 7.0, -44.0) == kummer_1f1(3.0, 7.0, -44.0));
}
