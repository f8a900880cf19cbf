#include "nakasum/io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "nakasum/errors.hpp"

namespace nakasum {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CorrelationMatrix parse_correlation_matrix(std::istream& is) {
  std::vector<double> values;
  std::string line;
  long dim = -1;
  while (std::getline(is, line)) {
    std::istringstream ls(strip_comment(line));
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ValidationError("correlation file: bad number '" + tok + "'");
      if (dim < 0) {
        if (v < 1.0 || v != std::floor(v)) throw ValidationError("correlation file: bad dimension");
        dim = static_cast<long>(v);
      } else {
        values.push_back(v);
      }
    }
  }
  if (dim < 0) throw ValidationError("correlation file: empty");
  const auto n = static_cast<std::size_t>(dim);
  if (values.size() != n * n) {
    throw ValidationError("correlation file: expected " + std::to_string(n * n) + " entries, got " +
                          std::to_string(values.size()));
  }
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = values[i * n + j];
  return CorrelationMatrix(m);
}

CorrelationMatrix read_correlation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open correlation file '" + path + "'");
  return parse_correlation_matrix(in);
}

void write_correlation_matrix(std::ostream& os, const CorrelationMatrix& m) {
  os << m.dim() << '\n';
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) os << (j ? " " : "") << fmt(m(i, j));
    os << '\n';
  }
}

void write_correlation_file(const std::string& path, const CorrelationMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write correlation file '" + path + "'");
  write_correlation_matrix(out, m);
  if (!out) throw IoError("failed writing correlation file '" + path + "'");
}

void write_curve_csv(std::ostream& os, const PerfCurve& curve, const std::string& kind,
                     const std::string& meta) {
  os << "snr_db,value,kind,meta\n";
  for (const auto& p : curve.points) {
    std::string m = meta;
    if (!std::isnan(p.std_error)) m += (m.empty() ? "" : ";") + std::string("se=") + fmt(p.std_error);
    os << fmt(p.snr_db) << ',' << fmt(p.value) << ',' << kind << ',' << m << '\n';
  }
}

std::string curve_to_json(const PerfCurve& curve, const std::string& kind,
                          const std::string& meta) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["meta"] = meta;
  j["points"] = nlohmann::json::array();
  for (const auto& p : curve.points) {
    nlohmann::ordered_json q;
    q["snr_db"] = p.snr_db;
    q["value"] = p.value;
    if (!std::isnan(p.std_error)) q["std_error"] = p.std_error;
    j["points"].push_back(q);
  }
  return j.dump(2);
}

}  // namespace nakasum
