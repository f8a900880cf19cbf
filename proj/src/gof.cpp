#include "nakasum/gof.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <numbers>
#include <thread>

#include "nakasum/errors.hpp"
#include "nakasum/gammasum.hpp"
#include "nakasum/matcher.hpp"
#include "nakasum/simkit.hpp"
#include "nakasum/specfun.hpp"

namespace nakasum {

double kolmogorov_survival(double x) {
  if (std::isnan(x)) throw ValidationError("kolmogorov_survival: NaN argument");
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // Jacobi theta form, fast for small x.
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double j = 2.0 * k - 1.0;
      const double term = std::exp(-j * j * pi * pi / (8.0 * x * x));
      s += term;
      if (term < 1e-17 * s) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> samples, const CdfFn& cdf) {
  const std::size_t n = samples.size();
  if (n < 10) throw ValidationError("ks_test: need at least 10 samples");
  for (double v : samples)
    if (std::isnan(v)) throw ValidationError("ks_test: NaN sample");
  std::sort(samples.begin(), samples.end());
  const double nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / nd - f, f - static_cast<double>(i) / nd});
  }
  return {d, kolmogorov_survival(std::sqrt(nd) * d)};
}

TestResult chi_square_test(const std::vector<double>& samples, const CdfFn& cdf,
                           std::size_t n_bins) {
  const std::size_t n = samples.size();
  if (n_bins < 2) throw ValidationError("chi_square_test: need at least 2 bins");
  if (n < 10 * n_bins) throw ValidationError("chi_square_test: need n >= 10 * n_bins");
  const double expected = static_cast<double>(n) / static_cast<double>(n_bins);
  if (expected < 5.0) throw ValidationError("chi_square_test: expected count per bin below 5");
  // Binning u = F(x) into equal cells equals binning x at the model quantiles.
  std::vector<std::size_t> counts(n_bins, 0);
  for (double v : samples) {
    if (std::isnan(v)) throw ValidationError("chi_square_test: NaN sample");
    const double u = std::clamp(cdf(v), 0.0, 1.0);
    const auto bin = std::min(static_cast<std::size_t>(u * static_cast<double>(n_bins)), n_bins - 1);
    ++counts[bin];
  }
  double chi2 = 0.0;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    chi2 += diff * diff / expected;
  }
  const double dof = static_cast<double>(n_bins - 1);
  return {chi2, gamma_q(0.5 * dof, 0.5 * chi2)};
}

GofReport gof_campaign(const EnsembleSpec& spec, std::uint64_t seed, const CampaignOptions& opts) {
  if (opts.trials < 1) throw ValidationError("gof_campaign: trials must be >= 1");
  const GammaSumModel model = match_parameters(spec);
  const EnvelopeTable table(model);
  const CdfFn cdf = [&table](double r) { return table.cdf(r); };

  std::vector<TestResult> cs(opts.trials);
  std::vector<TestResult> ks(opts.trials);
  const auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t t = first; t < opts.trials; t += stride) {
      const std::vector<double> z = sample_sum(spec, opts.per_trial, derive_seed(seed, t));
      cs[t] = chi_square_test(z, cdf, opts.n_bins);
      ks[t] = ks_test(z, cdf);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, opts.trials));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  GofReport rep;
  rep.n_samples = opts.per_trial;
  rep.n_trials = opts.trials;
  double a_cs = 0.0;
  double a_ks = 0.0;
  for (std::size_t t = 0; t < opts.trials; ++t) {
    rep.chi2_stat += cs[t].statistic;
    rep.ks_stat += ks[t].statistic;
    a_cs += cs[t].alpha;
    a_ks += ks[t].alpha;
  }
  const double nt = static_cast<double>(opts.trials);
  rep.chi2_stat /= nt;
  rep.ks_stat /= nt;
  if (opts.per_trial_alpha) {
    rep.alpha_mode = "mean-alpha";
    rep.alpha_cs = a_cs / nt;
    rep.alpha_ks = a_ks / nt;
  } else {
    const double dof = static_cast<double>(opts.n_bins - 1);
    rep.alpha_cs = gamma_q(0.5 * dof, 0.5 * rep.chi2_stat);
    rep.alpha_ks = kolmogorov_survival(std::sqrt(static_cast<double>(opts.per_trial)) * rep.ks_stat);
  }
  return rep;
}

std::string to_json(const GofReport& report) {
  nlohmann::ordered_json j;
  j["chi2_stat"] = report.chi2_stat;
  j["ks_stat"] = report.ks_stat;
  j["alpha_cs"] = report.alpha_cs;
  j["alpha_ks"] = report.alpha_ks;
  j["n_samples"] = report.n_samples;
  j["n_trials"] = report.n_trials;
  j["alpha_mode"] = report.alpha_mode;
  return j.dump(2);
}

}  // namespace nakasum
