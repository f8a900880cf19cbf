#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nakasum/linalg.hpp"
#include "nakasum/moments.hpp"

namespace nakasum {

// Correlated-Gamma proxy R with R^2 = sum_k Omega_R lambda_k / m_R * G_k,
// G_k ~ Gamma(m_R, 1) independent. Describes the approximate law of Z.
struct GammaSumModel {
  std::size_t branch_count = 0;
  double omega_r = 0.0;
  double m_r = 0.0;
  EigenSpectrum spectrum;
  MomentPair source_moments;
  double det_lambda = 1.0;
  std::vector<std::string> warnings;

  // Scale parameters Omega_R lambda_k / m_R of the non-degenerate factors.
  std::vector<double> gamma_scales() const;
  // E[R^2] and E[R^4] implied by the model.
  MomentPair implied_moments() const;
};

// Matches E[Z^2] and E[Z^4] of the ensemble.
GammaSumModel match_parameters(const EnsembleSpec& spec);

std::string to_json(const GammaSumModel& model);
// Throws ValidationError on malformed documents.
GammaSumModel model_from_json(const std::string& text);

}  // namespace nakasum
