#include "nakasum/matcher.hpp"

#include <cmath>
#include <json.hpp>

#include "nakasum/errors.hpp"

namespace nakasum {

namespace {

EigenSpectrum model_spectrum(const EnsembleSpec& spec) {
  const std::size_t n = spec.branch_count();
  if (const auto* e = std::get_if<EqualCorrelation>(&spec.correlation)) {
    const double s = std::sqrt(e->rho);
    EigenSpectrum out;
    out.values.assign(n, 1.0 - s);
    out.values[0] = 1.0 + static_cast<double>(n - 1) * s;
    return out;
  }
  return eigenvalues_sym(model_matrix(spec));
}

}  // namespace

std::vector<double> GammaSumModel::gamma_scales() const {
  std::vector<double> out;
  for (double l : spectrum.values) {
    if (l > 0.0) out.push_back(omega_r * l / m_r);
  }
  return out;
}

MomentPair GammaSumModel::implied_moments() const {
  // Cumulants of a Gamma sum: k1 = m sum c, k2 = m sum c^2.
  double s1 = 0.0;
  double s2 = 0.0;
  for (double c : gamma_scales()) {
    s1 += c;
    s2 += c * c;
  }
  const double mean = m_r * s1;
  return {mean, mean * mean + m_r * s2};
}

GammaSumModel match_parameters(const EnsembleSpec& spec) {
  spec.validate();
  const std::size_t n = spec.branch_count();
  const double l = static_cast<double>(n);
  GammaSumModel out;
  out.branch_count = n;

  if (is_maximally_correlated(spec)) {
    out.source_moments = moments_Z(spec);
    out.omega_r = out.source_moments.m2 / l;
    out.m_r = spec.fading_m;
    out.spectrum.values.assign(n, 0.0);
    out.spectrum.values[0] = l;
    out.det_lambda = n == 1 ? 1.0 : 0.0;
    return out;
  }

  // m_R depends only on the power ratios; normalizing first keeps it
  // bit-identical under a common scaling of the powers.
  EnsembleSpec unit = spec;
  const double p0 = spec.powers[0];
  for (double& p : unit.powers) p /= p0;
  const MomentPair mu = moments_Z(unit, &out.warnings);
  if (!(mu.m4 > mu.m2 * mu.m2)) {
    throw NumericalError("match_parameters: E[Z^4] <= E[Z^2]^2 (internal inconsistency)");
  }
  out.spectrum = model_spectrum(spec);
  out.det_lambda = determinant(model_matrix(spec).matrix());
  out.m_r = out.spectrum.sum_squares() / (l * l) * mu.m2 * mu.m2 /
            (mu.m4 - mu.m2 * mu.m2);
  out.source_moments = {mu.m2 * p0, mu.m4 * p0 * p0};
  out.omega_r = out.source_moments.m2 / l;
  return out;
}

std::string to_json(const GammaSumModel& model) {
  nlohmann::ordered_json j;
  j["L"] = model.branch_count;
  j["omega_r"] = model.omega_r;
  j["m_r"] = model.m_r;
  j["spectrum"] = model.spectrum.values;
  j["source_moments"] = {{"m2", model.source_moments.m2},
                         {"m4", model.source_moments.m4}};
  j["det_lambda"] = model.det_lambda;
  j["warnings"] = model.warnings;
  return j.dump(2);
}

GammaSumModel model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GammaSumModel m;
    m.branch_count = j.at("L").get<std::size_t>();
    m.omega_r = j.at("omega_r").get<double>();
    m.m_r = j.at("m_r").get<double>();
    m.spectrum.values = j.at("spectrum").get<std::vector<double>>();
    m.source_moments.m2 = j.at("source_moments").at("m2").get<double>();
    m.source_moments.m4 = j.at("source_moments").at("m4").get<double>();
    m.det_lambda = j.value("det_lambda", 1.0);
    m.warnings = j.value("warnings", std::vector<std::string>{});
    if (m.spectrum.values.size() != m.branch_count || !(m.omega_r > 0.0) ||
        !(m.m_r > 0.0)) {
      throw ValidationError("model document: inconsistent fields");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model document: ") + e.what());
  }
}

}  // namespace nakasum
