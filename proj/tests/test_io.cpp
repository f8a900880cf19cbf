#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <string>

#include "nakasum/errors.hpp"
#include "nakasum/io.hpp"
#include "helpers.hpp"

using namespace nakasum;

namespace {

CorrelationMatrix parse(const std::string& text) {
  std::istringstream is(text);
  return parse_correlation_matrix(is);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("parse a correlation file with comments") {
  const auto m = parse(
      "# three branches\n"
      "3\n"
      "1 0.5 0.25   # first row\n"
      "0.5 1 0.5\n"
      "\n"
      "0.25 0.5 1\n");
  REQUIRE(m.dim() == 3);
  CHECK(m(0, 2) == 0.25);
  CHECK(m(1, 0) == 0.5);
  CHECK(m(2, 2) == 1.0);
}

TEST_CASE("malformed correlation files") {
  CHECK_THROWS_AS(parse(""), ValidationError);
  CHECK_THROWS_AS(parse("# nothing\n"), ValidationError);
  CHECK_THROWS_AS(parse("2\n1 0.5\n0.5\n"), ValidationError);
  CHECK_THROWS_AS(parse("2\n1 0.5\n0.5 1 0.1\n"), ValidationError);
  CHECK_THROWS_AS(parse("2\n1 x\n0.5 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("2.5\n1 0.5\n0.5 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("0\n"), ValidationError);
  // Content is validated like any other correlation matrix.
  CHECK_THROWS_AS(parse("2\n1 0.5\n0.4 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("2\n1 1.5\n1.5 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("2\n0.9 0.5\n0.5 1\n"), ValidationError);
}

TEST_CASE("missing files are I/O errors") {
  CHECK_THROWS_AS(read_correlation_file("/nonexistent/dir/corr.txt"), IoError);
  CHECK_THROWS_AS(write_correlation_file("/nonexistent/dir/corr.txt", CorrelationMatrix::identity(2)),
                  IoError);
}

TEST_CASE("write and read back") {
  const auto g = testutil::green_matrix({0.9, 0.3, 0.7});
  const std::string path = temp_path("nakasum_io_roundtrip.txt");
  write_correlation_file(path, g);
  const auto back = read_correlation_file(path);
  std::remove(path.c_str());
  REQUIRE(back.dim() == g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j) CHECK(back(i, j) == g(i, j));

  // A fitted matrix written and re-fitted is stable.
  const CorrelationMatrix arb(Matrix{
      {1.0, 0.8, 0.4, 0.36}, {0.8, 1.0, 0.5, 0.45}, {0.4, 0.5, 1.0, 0.9}, {0.36, 0.45, 0.9, 1.0}});
  const auto fit = greens_fit(arb);
  std::stringstream ss;
  write_correlation_matrix(ss, fit.matrix);
  const auto refit = greens_fit(parse_correlation_matrix(ss));
  for (std::size_t k = 0; k < fit.links.size(); ++k)
    CHECK(std::fabs(refit.links[k] - fit.links[k]) < 1e-12);
}

TEST_CASE("curve CSV") {
  PerfCurve c;
  c.points = {{0.0, 0.1, std::numeric_limits<double>::quiet_NaN()}, {5.0, 0.01, 0.001}};
  std::ostringstream os;
  write_curve_csv(os, c, "ber", "model=equal");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "snr_db,value,kind,meta");
  std::getline(in, line);
  CHECK(line == "0,0.10000000000000001,ber,model=equal");
  std::getline(in, line);
  CHECK(line.rfind("5,0.01,ber,model=equal;se=", 0) == 0);
  CHECK(std::stod(line.substr(line.find("se=") + 3)) == 0.001);
  CHECK(!std::getline(in, line));
}

TEST_CASE("curve JSON agrees with CSV") {
  PerfCurve c;
  c.points = {{0.0, 0.25, std::numeric_limits<double>::quiet_NaN()}, {10.0, 1.5e-4, 2e-6}};
  const auto j = nlohmann::json::parse(curve_to_json(c, "outage", "t=1"));
  CHECK(j["kind"] == "outage");
  CHECK(j["meta"] == "t=1");
  REQUIRE(j["points"].size() == 2);
  CHECK(j["points"][0]["value"].get<double>() == 0.25);
  CHECK(!j["points"][0].contains("std_error"));
  CHECK(j["points"][1]["snr_db"].get<double>() == 10.0);
  CHECK(j["points"][1]["std_error"].get<double>() == 2e-6);
}
