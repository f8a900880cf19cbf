#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nakasum/moments.hpp"

namespace nakasum {

using CdfFn = std::function<double(double)>;

struct TestResult {
  double statistic = 0.0;
  double alpha = 0.0;
};

// Asymptotic Kolmogorov survival function P(K > x).
double kolmogorov_survival(double x);

// D_n = sup |F_n - F| over both one-sided gaps at each order statistic;
// alpha from the Kolmogorov limit at sqrt(n) D_n. Samples need not be sorted.
TestResult ks_test(std::vector<double> samples, const CdfFn& cdf);

// Equiprobable bins under the model CDF, n_bins - 1 degrees of freedom.
TestResult chi_square_test(const std::vector<double>& samples, const CdfFn& cdf,
                           std::size_t n_bins = 100);

struct GofReport {
  double chi2_stat = 0.0;
  double ks_stat = 0.0;
  double alpha_cs = 0.0;
  double alpha_ks = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_trials = 0;
  // How alpha_cs / alpha_ks were formed: "mean-statistic" or "mean-alpha".
  std::string alpha_mode = "mean-statistic";
};

struct CampaignOptions {
  std::size_t trials = 100;
  std::size_t per_trial = 10000;
  std::size_t n_bins = 100;
  // Report the mean of per-trial alphas instead of alpha at the mean statistic.
  bool per_trial_alpha = false;
  unsigned threads = 1;
};

// Repeated sampling of Z against the fitted model's envelope CDF. Trial t
// uses seed derive_seed(seed, t).
GofReport gof_campaign(const EnsembleSpec& spec, std::uint64_t seed,
                       const CampaignOptions& opts = {});

std::string to_json(const GofReport& report);

}  // namespace nakasum
