#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nakasum/egc.hpp"
#include "nakasum/errors.hpp"
#include "nakasum/gammasum.hpp"
#include "nakasum/gof.hpp"
#include "nakasum/io.hpp"
#include "nakasum/linalg.hpp"
#include "nakasum/matcher.hpp"
#include "nakasum/moments.hpp"
#include "nakasum/simkit.hpp"

using namespace nakasum;
using json = nlohmann::ordered_json;

namespace {

struct Flags {
  std::string model = "equal";
  double rho = 0.0;
  std::string corr_file;
  int mz = 1;
  std::size_t L = 0;
  std::string omega = "1";
  double mu = 0.0;
  double n0 = 0.0;
  std::string snr_grid = "0:30:5";
  std::string grid;
  std::string mod = "bpsk";
  std::size_t trials = 100;
  std::size_t per_trial = 10000;
  std::size_t bits = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  unsigned threads = 1;
  double threshold = 1.0;
  bool per_trial_alpha = false;
  bool bit_counting = false;
  std::string what = "all";
  std::string s_values = "-0.5";
  std::string table = "both";
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  const auto fail = [&] { throw ValidationError(std::string("bad ") + what + " '" + text + "'"); };
  const auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != s.size()) fail();
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) fail();
    const double a = num(parts[0]);
    const double b = num(parts[1]);
    const double step = num(parts[2]);
    if (!(step > 0.0) || b < a) fail();
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(num(p));
  if (out.empty()) fail();
  return out;
}

void add_spec_flags(CLI::App* app, Flags& f) {
  app->add_option("--model", f.model, "Correlation model")
      ->check(CLI::IsMember({"equal", "exp", "arbitrary"}));
  auto* rho = app->add_option("--rho", f.rho, "Power correlation coefficient");
  auto* file = app->add_option("--corr-file", f.corr_file, "Correlation matrix file");
  rho->excludes(file);
  app->add_option("--mz", f.mz, "Nakagami fading parameter (integer)");
  app->add_option("--L", f.L, "Number of branches");
  app->add_option("--omega", f.omega, "Branch power, scalar or comma list");
  app->add_option("--mu", f.mu, "Exponential power decay exponent");
}

EnsembleSpec build_spec(const Flags& f) {
  EnsembleSpec spec;
  spec.fading_m = f.mz;
  std::size_t L = f.L;
  std::vector<double> omega = parse_list(f.omega, "--omega");

  CorrelationMatrix file_matrix = CorrelationMatrix::identity(1);
  const bool have_file = !f.corr_file.empty();
  if (have_file) {
    if (f.model != "arbitrary") throw ValidationError("--corr-file requires --model arbitrary");
    file_matrix = read_correlation_file(f.corr_file);
    if (L != 0 && L != file_matrix.dim()) throw ValidationError("--L disagrees with --corr-file");
    L = file_matrix.dim();
  } else if (f.model == "arbitrary") {
    throw ValidationError("--model arbitrary requires --corr-file");
  }

  if (omega.size() > 1) {
    if (f.mu != 0.0) throw ValidationError("--mu needs a scalar --omega");
    if (L != 0 && L != omega.size()) throw ValidationError("--L disagrees with the --omega list");
    L = omega.size();
    spec.powers = omega;
  } else {
    if (L == 0) throw ValidationError("--L is required");
    spec.powers = power_profile(omega[0], f.mu, L);
  }
  if (have_file) {
    spec.correlation = ArbitraryCorrelation{file_matrix};
  } else if (f.model == "exp") {
    spec.correlation = ExponentialCorrelation{f.rho};
  } else {
    spec.correlation = EqualCorrelation{f.rho};
  }
  spec.validate();
  return spec;
}

std::string spec_meta(const Flags& f, const EnsembleSpec& spec) {
  std::ostringstream os;
  os << "model=" << f.model;
  if (f.corr_file.empty()) os << ";rho=" << f.rho;
  os << ";mz=" << spec.fading_m << ";L=" << spec.branch_count();
  if (f.mu != 0.0) os << ";mu=" << f.mu;
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("failed writing output");
  }

 private:
  std::ofstream file_;
};

std::string resolve_format(const Flags& f, const char* fallback) {
  const std::string fmt = f.format.empty() ? fallback : f.format;
  if (fmt != "csv" && fmt != "json" && fmt != "text") {
    throw ValidationError("--format must be csv, json or text");
  }
  return fmt;
}

// SNR points requested either as a grid or through --n0.
std::vector<double> snr_points(const Flags& f, const EnsembleSpec& spec) {
  if (f.n0 > 0.0) return {10.0 * std::log10(spec.powers[0] / f.n0)};
  if (f.n0 < 0.0) throw ValidationError("--n0 must be positive");
  return parse_list(f.snr_grid, "--snr-grid");
}

void emit_curve(const Flags& f, const PerfCurve& curve, const std::string& kind,
                const std::string& meta, const std::string& xname = "snr_db") {
  Output out(f.out);
  const std::string fmt = resolve_format(f, "csv");
  if (fmt == "json") {
    std::string text = curve_to_json(curve, kind, meta);
    if (xname != "snr_db") {
      auto j = json::parse(text);
      for (auto& p : j["points"]) {
        p[xname] = p["snr_db"];
        p.erase("snr_db");
      }
      text = j.dump(2);
    }
    out.stream() << text << '\n';
  } else {
    std::ostringstream os;
    write_curve_csv(os, curve, kind, meta);
    std::string text = os.str();
    if (xname != "snr_db") text.replace(0, 6, xname);
    out.stream() << text;
  }
  out.finish();
}

int cmd_match(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const GammaSumModel model = match_parameters(spec);
  Output out(f.out);
  const std::string fmt = resolve_format(f, "json");
  if (fmt == "csv") {
    out.stream() << "field,value\n"
                 << "L," << model.branch_count << '\n'
                 << "omega_r," << num(model.omega_r) << '\n'
                 << "m_r," << num(model.m_r) << '\n';
    for (std::size_t k = 0; k < model.spectrum.values.size(); ++k) {
      out.stream() << "lambda" << k + 1 << ',' << num(model.spectrum.values[k]) << '\n';
    }
    out.stream() << "m2," << num(model.source_moments.m2) << '\n'
                 << "m4," << num(model.source_moments.m4) << '\n';
  } else {
    out.stream() << to_json(model) << '\n';
  }
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
  out.finish();
  return 0;
}

int cmd_tables(const Flags& f) {
  Output out(f.out);
  const std::string fmt = resolve_format(f, "text");
  const std::vector<double> rhos{0.0, 0.2, 0.4, 0.6, 0.8};
  json doc = json::object();
  if (fmt == "csv") out.stream() << "table,model,rho,mz,L,m_r\n";
  for (int t = 1; t <= 2; ++t) {
    if ((f.table == "1" && t == 2) || (f.table == "2" && t == 1)) continue;
    const std::string model = t == 1 ? "equal" : "exp";
    if (fmt == "text") {
      out.stream() << "m_R, " << (t == 1 ? "equal" : "exponential") << " correlation\n"
                   << "rho ";
      for (int mz = 1; mz <= 3; ++mz)
        for (int L = 2; L <= 4; ++L) {
          out.stream() << std::setw(10) << ("mz=" + std::to_string(mz) + ",L=" + std::to_string(L));
        }
      out.stream() << '\n';
    }
    json cells = json::array();
    for (double rho : rhos) {
      if (fmt == "text") out.stream() << std::fixed << std::setprecision(1) << rho << "  ";
      for (int mz = 1; mz <= 3; ++mz) {
        for (int L = 2; L <= 4; ++L) {
          EnsembleSpec spec;
          spec.fading_m = mz;
          spec.powers.assign(static_cast<std::size_t>(L), 1.0);
          if (t == 1) spec.correlation = EqualCorrelation{rho};
          else spec.correlation = ExponentialCorrelation{rho};
          const double mr = match_parameters(spec).m_r;
          if (fmt == "text") {
            out.stream() << std::setw(10) << std::setprecision(4) << mr;
          } else if (fmt == "csv") {
            out.stream() << t << ',' << model << ',' << num(rho) << ',' << mz << ',' << L << ','
                         << num(mr) << '\n';
          } else {
            cells.push_back({{"rho", rho}, {"mz", mz}, {"L", L}, {"m_r", mr}});
          }
        }
      }
      if (fmt == "text") out.stream() << '\n';
    }
    if (fmt == "text") out.stream() << '\n';
    doc[model] = cells;
  }
  if (fmt == "json") out.stream() << doc.dump(2) << '\n';
  out.finish();
  return 0;
}

int cmd_pdf(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const GammaSumModel model = match_parameters(spec);
  PerfCurve curve;
  for (double r : parse_list(f.grid.empty() ? "0.1:3:0.1" : f.grid, "--grid")) {
    curve.points.push_back({r, pdf(model, r), std::nan("")});
  }
  emit_curve(f, curve, "pdf", spec_meta(f, spec) + ";domain=envelope", "r");
  return 0;
}

int cmd_cdf(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const GammaSumModel model = match_parameters(spec);
  PerfCurve curve;
  for (double t : parse_list(f.grid.empty() ? "0.5:10:0.5" : f.grid, "--grid")) {
    curve.points.push_back({t, cdf(model, t), std::nan("")});
  }
  emit_curve(f, curve, "cdf", spec_meta(f, spec) + ";domain=power", "t");
  return 0;
}

int cmd_outage(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const PerfCurve curve = outage_curve(spec, snr_points(f, spec), f.threshold);
  emit_curve(f, curve, "outage",
             std::string(kEquivalentMrcLabel) + ";" + spec_meta(f, spec) +
                 ";threshold=" + num(f.threshold));
  return 0;
}

int cmd_ber(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const Modulation mod = parse_modulation(f.mod);
  const PerfCurve curve = ber_curve(spec, snr_points(f, spec), mod);
  emit_curve(f, curve, "ber_" + to_string(mod),
             std::string(kEquivalentMrcLabel) + ";" + spec_meta(f, spec));
  return 0;
}

int cmd_mgf(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const GammaSumModel fitted = match_parameters(spec);
  const std::vector<double> svals = parse_list(f.s_values, "--s");
  Output out(f.out);
  const std::string fmt = resolve_format(f, "csv");
  json rows = json::array();
  if (fmt != "json") out.stream() << "snr_db,s,value\n";
  for (double db : snr_points(f, spec)) {
    const GammaSumModel m = egc_model(fitted, noise_for_snr(spec, db));
    for (double s : svals) {
      const double v = mgf(m, s);
      if (fmt == "json") {
        rows.push_back({{"snr_db", db}, {"s", s}, {"value", v}});
      } else {
        out.stream() << num(db) << ',' << num(s) << ',' << num(v) << '\n';
      }
    }
  }
  if (fmt == "json") out.stream() << rows.dump(2) << '\n';
  out.finish();
  return 0;
}

int cmd_validate(const Flags& f) {
  const EnsembleSpec spec = build_spec(f);
  const std::string fmt = resolve_format(f, "json");
  if (f.what != "gof" && f.what != "ber" && f.what != "all") {
    throw ValidationError("--what must be gof, ber or all");
  }
  json doc;
  doc["spec"] = spec_meta(f, spec);
  doc["seed"] = f.seed;
  std::ostringstream csv;
  if (f.what != "ber") {
    CampaignOptions opts;
    opts.trials = f.trials;
    opts.per_trial = f.per_trial;
    opts.per_trial_alpha = f.per_trial_alpha;
    opts.threads = f.threads;
    const GofReport rep = gof_campaign(spec, f.seed, opts);
    doc["gof"] = json::parse(to_json(rep));
    csv << "metric,value\n"
        << "chi2_stat," << num(rep.chi2_stat) << '\n'
        << "ks_stat," << num(rep.ks_stat) << '\n'
        << "alpha_cs," << num(rep.alpha_cs) << '\n'
        << "alpha_ks," << num(rep.alpha_ks) << '\n';
  }
  if (f.what != "gof") {
    ReceiverSpec rx;
    rx.ensemble = spec;
    rx.modulation = parse_modulation(f.mod);
    const std::vector<double> grid = snr_points(f, spec);
    const PerfCurve analytic = ber_curve(spec, grid, rx.modulation);
    const PerfCurve sim = simulate_egc_ber(
        rx, grid, f.bits, f.seed,
        f.bit_counting ? BerMethod::BitCounting : BerMethod::ConditionalError, f.threads);
    const std::string label = std::string(kEquivalentMrcLabel);
    doc["ber"] = {{"analytic", json::parse(curve_to_json(analytic, "ber_" + f.mod, label))},
                  {"simulated", json::parse(curve_to_json(sim, "ber_" + f.mod + "_sim",
                                                          f.bit_counting ? "bit-counting"
                                                                         : "conditional-error"))}};
    std::ostringstream a;
    write_curve_csv(a, analytic, "analytic", label);
    csv << a.str();
    std::ostringstream s;
    write_curve_csv(s, sim, "simulated", "");
    const std::string body = s.str();
    csv << body.substr(body.find('\n') + 1);
  }
  Output out(f.out);
  if (fmt == "json") out.stream() << doc.dump(2) << '\n';
  else out.stream() << csv.str();
  out.finish();
  return 0;
}

int cmd_greens(const Flags& f) {
  if (f.corr_file.empty()) throw ValidationError("greens needs --corr-file");
  const CorrelationMatrix m = read_correlation_file(f.corr_file);
  const GreensFit fit = greens_fit(m);
  if (fit.clamped) std::cerr << "warning: a Green's link was clamped to [0, 1]\n";
  const std::string fmt = resolve_format(f, "text");
  Output out(f.out);
  if (fmt == "json") {
    json j;
    j["links"] = fit.links;
    j["clamped"] = fit.clamped;
    json rows = json::array();
    for (std::size_t i = 0; i < fit.matrix.dim(); ++i) {
      std::vector<double> row;
      for (std::size_t k = 0; k < fit.matrix.dim(); ++k) row.push_back(fit.matrix(i, k));
      rows.push_back(row);
    }
    j["matrix"] = rows;
    out.stream() << j.dump(2) << '\n';
  } else {
    write_correlation_matrix(out.stream(), fit.matrix);
  }
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated Nakagami-m sums through moment-matched Gamma sums"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Output path (default stdout)");
    sub->add_option("--format", f.format, "csv, json or text");
  };
  const auto snr = [&](CLI::App* sub) {
    sub->add_option("--snr-grid", f.snr_grid, "Per-branch SNR grid in dB, a:b:step or list");
    sub->add_option("--n0", f.n0, "Noise PSD; overrides --snr-grid with one point");
  };

  auto* match = app.add_subcommand("match", "Fit Omega_R and m_R");
  add_spec_flags(match, f);
  common(match);

  auto* tables = app.add_subcommand("tables", "m_R for equal and exponential correlation grids");
  tables->add_option("--table", f.table, "1, 2 or both")->check(CLI::IsMember({"1", "2", "both"}));
  common(tables);

  auto* pdfc = app.add_subcommand("pdf", "Envelope density of R");
  add_spec_flags(pdfc, f);
  pdfc->add_option("--grid", f.grid, "Envelope abscissas r, a:b:step or list");
  common(pdfc);

  auto* cdfc = app.add_subcommand("cdf", "P(R^2 <= t)");
  add_spec_flags(cdfc, f);
  cdfc->add_option("--grid", f.grid, "Power thresholds t, a:b:step or list");
  common(cdfc);

  auto* out = app.add_subcommand("outage", "EGC outage probability");
  add_spec_flags(out, f);
  snr(out);
  out->add_option("--threshold", f.threshold, "Output SNR threshold (linear)");
  common(out);

  auto* berc = app.add_subcommand("ber", "EGC average bit error rate");
  add_spec_flags(berc, f);
  snr(berc);
  berc->add_option("--mod", f.mod, "bpsk or bfsk")->check(CLI::IsMember({"bpsk", "bfsk"}));
  common(berc);

  auto* mgfc = app.add_subcommand("mgf", "MGF of the EGC output SNR model");
  add_spec_flags(mgfc, f);
  snr(mgfc);
  mgfc->add_option("--s", f.s_values, "Arguments s <= 0, a:b:step or list");
  common(mgfc);

  auto* val = app.add_subcommand("validate", "Monte-Carlo goodness of fit and BER comparison");
  add_spec_flags(val, f);
  snr(val);
  val->add_option("--what", f.what, "gof, ber or all");
  val->add_option("--mod", f.mod, "bpsk or bfsk")->check(CLI::IsMember({"bpsk", "bfsk"}));
  val->add_option("--trials", f.trials, "Goodness-of-fit trials");
  val->add_option("--per-trial", f.per_trial, "Samples per trial");
  val->add_option("--bits", f.bits, "Monte-Carlo draws per SNR point");
  val->add_option("--seed", f.seed, "Random seed");
  val->add_option("--threads", f.threads, "Worker threads");
  val->add_flag("--per-trial-alpha", f.per_trial_alpha, "Average per-trial alphas");
  val->add_flag("--bit-counting", f.bit_counting, "Count bit errors instead of averaging");
  common(val);

  auto* gr = app.add_subcommand("greens", "Green's matrix fit of a correlation file");
  gr->add_option("--corr-file", f.corr_file, "Correlation matrix file")->required();
  common(gr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*match) return cmd_match(f);
    if (*tables) return cmd_tables(f);
    if (*pdfc) return cmd_pdf(f);
    if (*cdfc) return cmd_cdf(f);
    if (*out) return cmd_outage(f);
    if (*berc) return cmd_ber(f);
    if (*mgfc) return cmd_mgf(f);
    if (*val) return cmd_validate(f);
    if (*gr) return cmd_greens(f);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
