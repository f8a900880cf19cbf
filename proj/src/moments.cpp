#include "nakasum/moments.hpp"

#include <array>
#include <cmath>
#include <string>
#include <type_traits>

#include "nakasum/errors.hpp"

namespace nakasum {

namespace {

// Links at or above this are treated as fully correlated branches.
constexpr double kUnitLink = 1.0 - 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double gamma_ratio(double num, double den) {
  return std::exp(ln_gamma(num) - ln_gamma(den));
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ValidationError("rho must lie in [0, 1], got " + std::to_string(rho));
  }
}

// Branches grouped by the model matrix; fully correlated neighbours in a
// Green's structure collapse into one branch of amplitude sum sqrt(Omega).
struct ReducedEnsemble {
  std::vector<double> amp;  // sqrt of the group power
  Matrix corr;              // correlation between group representatives
};

ReducedEnsemble reduce_green(const EnsembleSpec& spec, const CorrelationMatrix& c) {
  const std::size_t n = spec.branch_count();
  std::vector<std::size_t> reps;
  std::vector<double> amp;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::sqrt(spec.powers[k]);
    if (k > 0 && c(k - 1, k) >= kUnitLink) {
      amp.back() += a;
    } else {
      reps.push_back(k);
      amp.push_back(a);
    }
  }
  Matrix corr(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = 0; j < reps.size(); ++j) corr(i, j) = c(reps[i], reps[j]);
  return {std::move(amp), std::move(corr)};
}

// Terms shared by every correlation model: sum_k Omega_k and the pairwise
// 2F1 contributions of E[Z^2] and E[Z^4].
struct PairTerms {
  double m2 = 0.0;
  double m4 = 0.0;
};

PairTerms pair_terms(std::span<const double> amp, const Matrix& corr, int m_z) {
  const double m = m_z;
  const double c2 = 2.0 * std::pow(gamma_ratio(m + 0.5, m), 2) / m;
  const double c4 = 4.0 * std::exp(ln_gamma(m + 1.5) + ln_gamma(m + 0.5) -
                                   2.0 * ln_gamma(m)) / (m * m);
  PairTerms out;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double p = amp[i] * amp[i];
    out.m2 += p;
    out.m4 += (m + 1.0) / m * p * p;
  }
  for (std::size_t i = 0; i < amp.size(); ++i) {
    for (std::size_t j = i + 1; j < amp.size(); ++j) {
      const double rho = corr(i, j) * corr(i, j);
      const double ai = amp[i];
      const double aj = amp[j];
      out.m2 += c2 * ai * aj * gauss_2f1(-0.5, -0.5, m, rho);
      // 6 Gamma(m+1)^2 / (m^2 Gamma(m)^2) = 6.
      out.m4 += 6.0 * ai * ai * aj * aj * gauss_2f1(-1.0, -1.0, m, rho);
      out.m4 += c4 * (ai * ai * ai * aj + ai * aj * aj * aj) *
                gauss_2f1(-1.5, -0.5, m, rho);
    }
  }
  return out;
}

MomentPair equal_path(const EnsembleSpec& spec, double rho,
                      std::vector<std::string>* warnings) {
  const std::size_t n = spec.branch_count();
  std::vector<double> amp(n);
  for (std::size_t k = 0; k < n; ++k) amp[k] = std::sqrt(spec.powers[k]);
  const Matrix corr = CorrelationMatrix::equal(n, rho).matrix();
  const PairTerms pairs = pair_terms(amp, corr, spec.fading_m);
  MomentPair out{pairs.m2, pairs.m4};
  if (n < 3) return out;

  const double m = spec.fading_m;
  const double shrink = std::pow((1.0 - std::sqrt(rho)) / m, 2);
  const std::array<int, 3> o3{2, 1, 1};
  const double triple = shrink * w_coefficient(o3, spec.fading_m, rho);
  double s3 = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        s3 += amp[a] * amp[b] * amp[c] * (amp[a] + amp[b] + amp[c]);
      }
  out.m4 += 12.0 * triple * s3;
  if (n < 4) return out;

  const std::array<int, 4> o4{1, 1, 1, 1};
  bool boundary = false;
  const double quad =
      shrink * w_coefficient_lauricella(o4, spec.fading_m, rho, &boundary);
  if (boundary && warnings) {
    warnings->push_back("W(1,1,1,1): Lauricella F_A evaluated near its convergence boundary");
  }
  double s4 = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (std::size_t d = c + 1; d < n; ++d) s4 += amp[a] * amp[b] * amp[c] * amp[d];
  out.m4 += 24.0 * quad * s4;
  return out;
}

// `pairs_from` supplies rho_ij for the pairwise terms; it is only honoured
// when no branches had to be merged.
MomentPair green_path(const EnsembleSpec& spec, const CorrelationMatrix& c,
                      const CorrelationMatrix& pairs_from,
                      std::vector<std::string>* warnings) {
  const ReducedEnsemble red = reduce_green(spec, c);
  const std::size_t n = red.amp.size();
  const auto& amp = red.amp;
  const bool merged = n < spec.branch_count();
  if (merged && warnings && !(pairs_from == c)) {
    warnings->push_back("fully correlated Green's links: pairwise terms taken from the fitted matrix");
  }
  const PairTerms pairs =
      pair_terms(amp, merged ? red.corr : pairs_from.matrix(), spec.fading_m);
  MomentPair out{pairs.m2, pairs.m4};
  if (n < 3) return out;

  const CorrelationMatrix corr(red.corr);
  double s3 = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t d = b + 1; d < n; ++d) {
        const std::array<std::size_t, 3> idx{a, b, d};
        const Matrix delta = principal_submatrix_inverse(corr, idx);
        s3 += amp[a] * amp[a] * amp[b] * amp[d] *
              joint_moment_triple(2, 1, 1, delta, spec.fading_m);
        s3 += amp[a] * amp[b] * amp[b] * amp[d] *
              joint_moment_triple(1, 2, 1, delta, spec.fading_m);
        s3 += amp[a] * amp[b] * amp[d] * amp[d] *
              joint_moment_triple(1, 1, 2, delta, spec.fading_m);
      }
  out.m4 += 12.0 * s3;
  if (n < 4) return out;

  double s4 = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t d = b + 1; d < n; ++d)
        for (std::size_t e = d + 1; e < n; ++e) {
          const std::array<std::size_t, 4> idx{a, b, d, e};
          const Matrix psi = principal_submatrix_inverse(corr, idx);
          s4 += amp[a] * amp[b] * amp[d] * amp[e] *
                joint_moment_quad(psi, spec.fading_m);
        }
  out.m4 += 24.0 * s4;
  return out;
}

}  // namespace

void EnsembleSpec::validate() const {
  if (powers.empty()) throw ValidationError("ensemble needs at least one branch");
  if (fading_m < 1) throw ValidationError("fading parameter m_z must be an integer >= 1");
  for (double p : powers) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw ValidationError("branch powers must be positive and finite");
    }
  }
  std::visit(Overloaded{
                 [](const EqualCorrelation& e) { check_rho(e.rho); },
                 [](const ExponentialCorrelation& e) { check_rho(e.rho); },
                 [&](const ArbitraryCorrelation& a) {
                   if (a.matrix.dim() != powers.size()) {
                     throw ValidationError("correlation matrix dimension must equal L");
                   }
                 },
             },
             correlation);
}

CorrelationMatrix correlation_matrix(const EnsembleSpec& spec) {
  const std::size_t n = spec.branch_count();
  return std::visit(
      Overloaded{
          [&](const EqualCorrelation& e) { return CorrelationMatrix::equal(n, e.rho); },
          [&](const ExponentialCorrelation& e) {
            return CorrelationMatrix::exponential(n, e.rho);
          },
          [](const ArbitraryCorrelation& a) { return a.matrix; },
      },
      spec.correlation);
}

CorrelationMatrix model_matrix(const EnsembleSpec& spec) {
  if (const auto* a = std::get_if<ArbitraryCorrelation>(&spec.correlation)) {
    return greens_fit(a->matrix).matrix;
  }
  return correlation_matrix(spec);
}

bool is_maximally_correlated(const EnsembleSpec& spec) {
  const CorrelationMatrix c = model_matrix(spec);
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = i + 1; j < c.dim(); ++j)
      if (c(i, j) < kUnitLink) return false;
  return true;
}

MomentPair moments_Z(const EnsembleSpec& spec, std::vector<std::string>* warnings) {
  spec.validate();
  const double m = spec.fading_m;
  if (is_maximally_correlated(spec)) {
    // Z = (sum sqrt(Omega_i)) Z_0 with Z_0 unit-power Nakagami-m.
    double s = 0.0;
    for (double p : spec.powers) s += std::sqrt(p);
    const double m2 = s * s;
    return {m2, (m + 1.0) / m * m2 * m2};
  }
  if (const auto* e = std::get_if<EqualCorrelation>(&spec.correlation)) {
    return equal_path(spec, e->rho, warnings);
  }
  if (const auto* a = std::get_if<ArbitraryCorrelation>(&spec.correlation)) {
    const GreensFit fit = greens_fit(a->matrix);
    if (fit.clamped && warnings) {
      warnings->push_back("Green's fit clamped a link coefficient to [0, 1]");
    }
    return green_path(spec, fit.matrix, a->matrix, warnings);
  }
  const CorrelationMatrix c = correlation_matrix(spec);
  return green_path(spec, c, c, warnings);
}

double second_moment_Z(const EnsembleSpec& spec) { return moments_Z(spec).m2; }

double fourth_moment_Z(const EnsembleSpec& spec) { return moments_Z(spec).m4; }

double w_coefficient_lauricella(std::span<const int> orders, int m_z, double rho,
                                bool* near_boundary) {
  if (orders.empty()) throw ValidationError("w_coefficient: orders must be non-empty");
  if (m_z < 1) throw ValidationError("w_coefficient: m_z must be >= 1");
  check_rho(rho);
  if (rho == 1.0) {
    throw DomainError("w_coefficient: rho = 1 is the maximal-correlation boundary");
  }
  const double m = m_z;
  const double n = static_cast<double>(orders.size());
  const double s = std::sqrt(rho);
  const double arg = s / (1.0 + (n - 1.0) * s);
  double log_pre = m * std::log((1.0 - s) / (1.0 + (n - 1.0) * s));
  std::vector<double> b;
  std::vector<double> c(orders.size(), m);
  std::vector<double> x(orders.size(), arg);
  for (int k : orders) {
    if (k < 1) throw ValidationError("w_coefficient: orders must be positive");
    log_pre += ln_gamma(m + 0.5 * k) - ln_gamma(m);
    b.push_back(m + 0.5 * k);
  }
  const LauricellaResult fa = lauricella_fa(m, b, c, x);
  if (near_boundary) *near_boundary = fa.near_boundary;
  return std::exp(log_pre) * fa.value;
}

double w_coefficient(std::span<const int> orders, int m_z, double rho) {
  if (orders.size() == 3 && orders[0] == 2 && orders[1] == 1 && orders[2] == 1) {
    check_rho(rho);
    if (rho == 1.0) {
      throw DomainError("w_coefficient: rho = 1 is the maximal-correlation boundary");
    }
    return w211_reduced(m_z, rho);
  }
  return w_coefficient_lauricella(orders, m_z, rho);
}

double j_identity(double m, double a, double p, double q) {
  if (!(m > 0.0)) throw DomainError("j_identity: m must be positive");
  if (!(a > -0.5)) throw DomainError("j_identity: a must exceed -1/2");
  return std::pow(1.0 + a, 0.5 * p) * std::pow((1.0 + 2.0 * a) / (1.0 + a), 0.5 * q) *
         gauss_2f1(m + 0.5 * p, -0.5 * q, m, -a * a / (1.0 + 2.0 * a));
}

double w211_reduced(int m_z, double rho) {
  if (m_z < 1) throw ValidationError("w211_reduced: m_z must be >= 1");
  check_rho(rho);
  if (rho == 1.0) throw DomainError("w211_reduced: rho must be < 1");
  const double m = m_z;
  const double s = std::sqrt(rho);
  // After Kummer's transformation the F_A integral carries
  // 1F1(-1/2; m; -a u) with a = sqrt(rho) / (1 - sqrt(rho)); the extra u from
  // the order-2 factor is absorbed by the contiguous relation
  // 1F1(-1/2; m; z) = [(m+1/2) 1F1(-1/2; m+1; z) - 1/2 1F1(1/2; m+1; z)] / m.
  const double a = s / (1.0 - s);
  const double h = m + 0.5;
  const double bracket = j_identity(m, a, 1, 1) +
                         a * h * h / (m * m) * j_identity(m + 1, a, 1, 1) +
                         a / (4.0 * m * m) * j_identity(m + 1, a, -1, -1) -
                         a * h / (m * m) * j_identity(m + 1, a, -1, 1);
  return m * std::pow(gamma_ratio(m + 0.5, m), 2) * bracket;
}

double joint_moment_triple(int n1, int n2, int n3, const Matrix& delta, int m_z,
                           const SeriesControl& ctrl) {
  ctrl.validate();
  const bool valid = (n1 == 2 && n2 == 1 && n3 == 1) ||
                     (n1 == 1 && n2 == 2 && n3 == 1) ||
                     (n1 == 1 && n2 == 1 && n3 == 2);
  if (!valid) throw ValidationError("joint_moment_triple: orders must be a permutation of (2,1,1)");
  if (delta.dim() != 3) throw ValidationError("joint_moment_triple: delta must be 3x3");
  if (m_z < 1) throw ValidationError("joint_moment_triple: m_z must be >= 1");
  const double m = m_z;
  const double h1 = 0.5 * n1;
  const double h2 = 0.5 * n2;
  const double h3 = 0.5 * n3;
  const double d11 = delta(0, 0);
  const double d22 = delta(1, 1);
  const double d33 = delta(2, 2);
  const double det = determinant(delta);
  if (!(det > 0.0) || !(d11 > 0.0) || !(d22 > 0.0) || !(d33 > 0.0)) {
    throw ValidationError("joint_moment_triple: delta must be positive definite");
  }
  const double ratio = delta(0, 1) * delta(0, 1) / (d11 * d22);
  const double x23 = delta(1, 2) * delta(1, 2) / (d22 * d33);

  const double log_pre = m * std::log(det) - (m + h1) * std::log(d11) -
                         (m + h2) * std::log(d22) - (m + h3) * std::log(d33) +
                         ln_gamma(m + h3) - 2.0 * ln_gamma(m) -
                         (h1 + h2 + h3) * std::log(m);
  double sum = 0.0;
  int quiet = 0;
  for (std::size_t k = 0; k < ctrl.max_terms; ++k) {
    const double kd = static_cast<double>(k);
    double log_term = ln_gamma(m + kd + h1) + ln_gamma(m + kd + h2) -
                      ln_gamma(m + kd) - ln_gamma(kd + 1.0);
    if (k > 0) {
      if (ratio == 0.0) break;
      log_term += kd * std::log(ratio);
    }
    const double term =
        std::exp(log_term) * gauss_2f1(m + kd + h2, m + h3, m, x23, ctrl);
    sum += term;
    if (term <= ctrl.rel_tol * sum) {
      if (++quiet == 3) return std::exp(log_pre) * sum;
    } else {
      quiet = 0;
    }
  }
  if (ratio == 0.0) return std::exp(log_pre) * sum;
  throw TruncationError("joint_moment_triple: series did not converge",
                        std::exp(log_pre) * sum);
}

double joint_moment_quad(const Matrix& psi, int m_z, const SeriesControl& ctrl) {
  ctrl.validate();
  if (psi.dim() != 4) throw ValidationError("joint_moment_quad: psi must be 4x4");
  if (m_z < 1) throw ValidationError("joint_moment_quad: m_z must be >= 1");
  const double m = m_z;
  const double det = determinant(psi);
  const double p11 = psi(0, 0);
  const double p22 = psi(1, 1);
  const double p33 = psi(2, 2);
  const double p44 = psi(3, 3);
  if (!(det > 0.0) || !(p11 > 0.0) || !(p22 > 0.0) || !(p33 > 0.0) || !(p44 > 0.0)) {
    throw ValidationError("joint_moment_quad: psi must be positive definite");
  }
  const double ratio = psi(1, 2) * psi(1, 2) / (p22 * p33);
  const double x12 = psi(0, 1) * psi(0, 1) / (p11 * p22);
  const double x34 = psi(2, 3) * psi(2, 3) / (p33 * p44);
  const double log_pre = m * std::log(det) -
                         (m + 0.5) * std::log(p11 * p22 * p33 * p44) +
                         2.0 * ln_gamma(m + 0.5) - 3.0 * ln_gamma(m) -
                         2.0 * std::log(m);
  double sum = 0.0;
  int quiet = 0;
  for (std::size_t k = 0; k < ctrl.max_terms; ++k) {
    const double kd = static_cast<double>(k);
    double log_term = 2.0 * ln_gamma(m + kd + 0.5) - ln_gamma(kd + 1.0) -
                      ln_gamma(m + kd);
    if (k > 0) {
      if (ratio == 0.0) break;
      log_term += kd * std::log(ratio);
    }
    const double term = std::exp(log_term) *
                        gauss_2f1(m + 0.5, kd + m + 0.5, m, x12, ctrl) *
                        gauss_2f1(m + 0.5, kd + m + 0.5, m, x34, ctrl);
    sum += term;
    if (term <= ctrl.rel_tol * sum) {
      if (++quiet == 3) return std::exp(log_pre) * sum;
    } else {
      quiet = 0;
    }
  }
  if (ratio == 0.0) return std::exp(log_pre) * sum;
  throw TruncationError("joint_moment_quad: series did not converge",
                        std::exp(log_pre) * sum);
}

}  // namespace nakasum
