#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nakasum/moments.hpp"
#include "nakasum/specfun.hpp"

namespace testutil {

inline nakasum::EnsembleSpec equal_spec(double rho, int m, std::size_t L, double omega = 1.0) {
  nakasum::EnsembleSpec s;
  s.fading_m = m;
  s.powers.assign(L, omega);
  s.correlation = nakasum::EqualCorrelation{rho};
  return s;
}

inline nakasum::EnsembleSpec exp_spec(double rho, int m, std::size_t L, double omega = 1.0) {
  nakasum::EnsembleSpec s;
  s.fading_m = m;
  s.powers.assign(L, omega);
  s.correlation = nakasum::ExponentialCorrelation{rho};
  return s;
}

// Green's matrix with adjacent links t_k.
inline nakasum::CorrelationMatrix green_matrix(const std::vector<double>& links) {
  const std::size_t n = links.size() + 1;
  nakasum::Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    double c = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      c *= links[j - 1];
      m(i, j) = c;
      m(j, i) = c;
    }
  }
  return nakasum::CorrelationMatrix(m);
}

inline double nakagami_pdf(double r, double m, double omega) {
  return std::exp(std::log(2.0) + m * std::log(m / omega) + (2.0 * m - 1.0) * std::log(r) -
                  m * r * r / omega - nakasum::ln_gamma(m));
}

inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

}  // namespace testutil
