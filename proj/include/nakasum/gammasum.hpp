#pragma once

#include <cstddef>
#include <vector>

#include "nakasum/matcher.hpp"
#include "nakasum/quadrature.hpp"

namespace nakasum {

// MGF of R^2. Consumers use s <= 0; small positive s, up to the first pole
// m_R / (Omega_R lambda_1), is accepted for derivatives at the origin.
double mgf(const GammaSumModel& model, double s);

// Density of the envelope R, by inversion of the characteristic function.
double pdf(const GammaSumModel& model, double r, const QuadratureControl& ctrl = {});

// Closed form for models fitted to equal correlation with coefficient rho.
double pdf_equal_corr(const GammaSumModel& model, double rho, double r);

// P(R^2 <= t). Note the power-domain threshold.
double cdf(const GammaSumModel& model, double t, const QuadratureControl& ctrl = {});

// Envelope-domain distribution of R tabulated on a fixed grid and
// interpolated with cubic Hermite splines (slopes from the density). Meant
// for statistics that evaluate the CDF at millions of points.
class EnvelopeTable {
 public:
  explicit EnvelopeTable(const GammaSumModel& model, std::size_t points = 2048,
                         const QuadratureControl& ctrl = {});

  // P(R <= r).
  double cdf(double r) const;
  // Inverse of cdf: grid search, then bisection on the interpolant.
  double quantile(double p) const;
  double upper() const { return r_.back(); }

 private:
  std::vector<double> r_;
  std::vector<double> f_;
  std::vector<double> d_;
};

}  // namespace nakasum
