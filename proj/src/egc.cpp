#include "nakasum/egc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nakasum/errors.hpp"

namespace nakasum {

std::string to_string(Modulation mod) {
  return mod == Modulation::BpskCoherent ? "bpsk" : "bfsk";
}

Modulation parse_modulation(const std::string& name) {
  if (name == "bpsk") return Modulation::BpskCoherent;
  if (name == "bfsk") return Modulation::BfskNoncoherent;
  throw ValidationError("unknown modulation '" + name + "' (expected bpsk or bfsk)");
}

void ReceiverSpec::validate() const {
  ensemble.validate();
  if (!(noise_psd > 0.0) || !std::isfinite(noise_psd)) {
    throw ValidationError("noise PSD N0 must be positive");
  }
}

GammaSumModel egc_model(const GammaSumModel& fitted, double noise_psd) {
  if (!(noise_psd > 0.0)) throw ValidationError("noise PSD N0 must be positive");
  GammaSumModel out = fitted;
  out.omega_r = fitted.omega_r / (static_cast<double>(fitted.branch_count) * noise_psd);
  return out;
}

GammaSumModel egc_model(const ReceiverSpec& rx) {
  rx.validate();
  return egc_model(match_parameters(rx.ensemble), rx.noise_psd);
}

double outage(const GammaSumModel& model, double threshold, const QuadratureControl& ctrl) {
  if (!(threshold > 0.0)) throw DomainError("outage: threshold must be positive");
  return cdf(model, threshold, ctrl);
}

namespace {

double chebyshev_rule(const GammaSumModel& model, std::size_t n) {
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double theta = (2.0 * static_cast<double>(i) - 1.0) * std::numbers::pi / (4.0 * nd);
    const double s = std::sin(theta);
    acc += mgf(model, -1.0 / (s * s));
  }
  return acc / (2.0 * nd);
}

}  // namespace

double ber_bpsk(const GammaSumModel& model, std::size_t nodes) {
  if (nodes < 1) throw ValidationError("ber_bpsk: nodes must be >= 1");
  constexpr std::size_t kMaxNodes = std::size_t{1} << 20;
  double prev = chebyshev_rule(model, nodes);
  for (std::size_t n = 2 * nodes; n <= kMaxNodes; n *= 2) {
    const double cur = chebyshev_rule(model, n);
    if (std::fabs(cur - prev) <= 1e-10 * std::fabs(cur)) return cur;
    prev = cur;
  }
  throw AccuracyError("ber_bpsk: Gauss-Chebyshev rules did not agree to 1e-10",
                      prev, chebyshev_rule(model, kMaxNodes / 2));
}

double ber_bfsk_noncoherent(const GammaSumModel& model) { return 0.5 * mgf(model, -0.5); }

double ber(const GammaSumModel& model, Modulation mod) {
  return mod == Modulation::BpskCoherent ? ber_bpsk(model) : ber_bfsk_noncoherent(model);
}

std::vector<double> power_profile(double omega1, double mu, std::size_t L) {
  if (!(omega1 > 0.0)) throw ValidationError("power_profile: omega1 must be positive");
  if (!(mu >= 0.0)) throw ValidationError("power_profile: mu must be >= 0");
  if (L < 1) throw ValidationError("power_profile: L must be >= 1");
  std::vector<double> out(L);
  for (std::size_t k = 0; k < L; ++k) out[k] = omega1 * std::exp(-mu * static_cast<double>(k));
  return out;
}

double noise_for_snr(const EnsembleSpec& spec, double snr_db) {
  if (spec.powers.empty()) throw ValidationError("ensemble has no branches");
  if (!std::isfinite(snr_db)) throw ValidationError("SNR must be finite");
  return spec.powers[0] / std::pow(10.0, snr_db / 10.0);
}

PerfCurve ber_curve(const EnsembleSpec& spec, const std::vector<double>& snr_db,
                    Modulation mod) {
  const GammaSumModel fitted = match_parameters(spec);
  PerfCurve out;
  for (double db : snr_db) {
    const GammaSumModel m = egc_model(fitted, noise_for_snr(spec, db));
    out.points.push_back({db, ber(m, mod), std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

PerfCurve outage_curve(const EnsembleSpec& spec, const std::vector<double>& snr_db,
                       double threshold, const QuadratureControl& ctrl) {
  const GammaSumModel fitted = match_parameters(spec);
  PerfCurve out;
  for (double db : snr_db) {
    const GammaSumModel m = egc_model(fitted, noise_for_snr(spec, db));
    out.points.push_back(
        {db, outage(m, threshold, ctrl), std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

}  // namespace nakasum
