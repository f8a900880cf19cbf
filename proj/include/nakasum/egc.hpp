#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nakasum/gammasum.hpp"
#include "nakasum/matcher.hpp"
#include "nakasum/moments.hpp"

namespace nakasum {

enum class Modulation { BpskCoherent, BfskNoncoherent };

std::string to_string(Modulation mod);
// Accepts "bpsk" or "bfsk".
Modulation parse_modulation(const std::string& name);

struct ReceiverSpec {
  EnsembleSpec ensemble;
  double noise_psd = 1.0;  // N0, linear
  Modulation modulation = Modulation::BpskCoherent;

  void validate() const;
};

struct PerfPoint {
  double snr_db = 0.0;
  double value = 0.0;
  // Monte-Carlo standard error; NaN for analytic points.
  double std_error = 0.0;
};

struct PerfCurve {
  std::vector<PerfPoint> points;
};

// Every EGC figure below comes from the equivalent MRC system whose output
// SNR is modelled by R^2 / (L N0).
inline constexpr const char* kEquivalentMrcLabel = "equivalent-MRC approximation";

// Model of the EGC output SNR: omega_r rescaled to Omega_R / (L N0).
GammaSumModel egc_model(const ReceiverSpec& rx);
// Rescales an already fitted ensemble model.
GammaSumModel egc_model(const GammaSumModel& fitted, double noise_psd);

double outage(const GammaSumModel& model, double threshold,
              const QuadratureControl& ctrl = {});

// Gauss-Chebyshev rule on the MGF integral. The node count doubles until two
// consecutive rules agree to 1e-10 relative.
double ber_bpsk(const GammaSumModel& model, std::size_t nodes = 64);
double ber_bfsk_noncoherent(const GammaSumModel& model);
double ber(const GammaSumModel& model, Modulation mod);

// Omega_k = omega1 exp(-mu (k - 1)).
std::vector<double> power_profile(double omega1, double mu, std::size_t L);

// N0 giving per-branch average SNR Omega_1 / N0 equal to `snr_db`.
double noise_for_snr(const EnsembleSpec& spec, double snr_db);

// Analytic curves over per-branch average SNR. The moment fit runs once.
PerfCurve ber_curve(const EnsembleSpec& spec, const std::vector<double>& snr_db,
                    Modulation mod);
PerfCurve outage_curve(const EnsembleSpec& spec, const std::vector<double>& snr_db,
                       double threshold, const QuadratureControl& ctrl = {});

}  // namespace nakasum
