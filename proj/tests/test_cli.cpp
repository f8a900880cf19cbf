#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(NAKASUM_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("match prints the fitted model") {
  const auto a = run("match --model equal --rho 0.2 --mz 1 --L 2");
  REQUIRE(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(std::fabs(j["m_r"].get<double>() - 0.9195) < 5e-4);
  CHECK(j["L"] == 2);

  const auto b = run("match --model exp --rho 0.8 --mz 3 --L 4");
  REQUIRE(b.code == 0);
  CHECK(std::fabs(nlohmann::json::parse(b.out)["m_r"].get<double>() - 2.9072) < 5e-4);

  const auto c = run("match --model exp --rho 1 --mz 2 --L 3");
  REQUIRE(c.code == 0);
  CHECK(nlohmann::json::parse(c.out)["m_r"].get<double>() == 2.0);
}

TEST_CASE("tables") {
  const auto t = run("tables --table 1");
  REQUIRE(t.code == 0);
  CHECK(t.out.find("0.9195") != std::string::npos);
  CHECK(t.out.find("1.9333") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run("match --model equal --rho 0.2 --corr-file x.txt --mz 1 --L 2").code == 2);
  CHECK(run("match --model equal --rho 1.5 --mz 1 --L 2").code == 2);
  CHECK(run("match --model arbitrary --corr-file /nonexistent/corr.txt --mz 1").code == 4);
  CHECK(run("greens --corr-file /nonexistent/corr.txt").code == 4);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("BFSK BER is half the MGF at -1/2") {
  const auto ber = run("ber --model equal --rho 0.4 --mz 2 --L 3 --mod bfsk --n0 0.5");
  const auto mgf = run("mgf --model equal --rho 0.4 --mz 2 --L 3 --s -0.5 --n0 0.5");
  REQUIRE(ber.code == 0);
  REQUIRE(mgf.code == 0);
  const auto br = csv_rows(ber.out);
  const auto mr = csv_rows(mgf.out);
  REQUIRE(br.size() == 2);
  REQUIRE(mr.size() == 2);
  CHECK(std::stod(br[1][1]) == doctest::Approx(0.5 * std::stod(mr[1][2])).epsilon(1e-14));
}

TEST_CASE("JSON and CSV outputs agree") {
  const std::string args = "ber --model exp --rho 0.6 --mz 2 --L 4 --mod bpsk --snr-grid 0:20:5";
  const auto csv = run(args);
  const auto json = run(args + " --format json");
  REQUIRE(csv.code == 0);
  REQUIRE(json.code == 0);
  const auto rows = csv_rows(csv.out);
  const auto j = nlohmann::json::parse(json.out);
  REQUIRE(rows.size() == 6);
  REQUIRE(j["points"].size() == 5);
  CHECK(rows[0][0] == "snr_db");
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::stod(rows[i + 1][0]) == j["points"][i]["snr_db"].get<double>());
    CHECK(std::stod(rows[i + 1][1]) == j["points"][i]["value"].get<double>());
  }
}

TEST_CASE("greens fit of a file") {
  const std::string path = "cli_corr.txt";
  FILE* f = std::fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fputs("3\n1 0.8 0.4\n0.8 1 0.5\n0.4 0.5 1\n", f);
  std::fclose(f);
  const auto r = run("greens --corr-file " + path);
  CHECK(r.code == 0);
  CHECK(!r.out.empty());
  const auto m = run("match --model arbitrary --corr-file " + path + " --mz 2");
  CHECK(m.code == 0);
  std::remove(path.c_str());
}

TEST_CASE("validate is deterministic in seed and threads") {
  const std::string args =
      "validate --model equal --rho 0.2 --mz 1 --L 3 --what all --trials 4 --per-trial 2000 "
      "--bits 20000 --seed 5 --snr-grid 0,10 --format json";
  const auto a = run(args);
  const auto b = run(args + " --threads 3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["gof"]["n_trials"] == 4);
  CHECK(j["ber"]["simulated"]["points"].size() == 2);
  CHECK(run(args.substr(0, args.find("--seed")) + "--seed 6 --snr-grid 0,10 --format json").out !=
        a.out);
}
