#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "schmidtlab/cli.hpp"
#include "schmidtlab/io.hpp"

using namespace schmidtlab;
using io::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "schmidtlab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Json json_of(const Run& r) { return Json::parse(r.out); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("cli derive") {
  auto r = run({"derive", "--pump-waist", "1e-3", "--pump-wavelength", "405e-9", "--crystal-length", "5e-3"});
  REQUIRE(r.code == exit_ok);
  auto j = json_of(r);
  CHECK(j["b_sigma"].get<double>() == doctest::Approx(0.017953).epsilon(1e-4));
  CHECK(j["units"]["b"] == "m");
  CHECK(j["manifest"]["command"] == "derive");

  j = json_of(run({"derive", "--b-sigma", "1"}));
  CHECK(j["mu"].get<double>() == 0.0);
  CHECK(j["K"].get<double>() == 1.0);
  CHECK(j["rayleigh_z_r"].is_null());

  j = json_of(run({"derive", "--b", "1", "--sigma", "3"}));
  CHECK(j["mu"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(run({"derive", "--b", "1", "--sigma", "3", "--b-sigma", "3"}).code == exit_ok);
  CHECK(run({"derive", "--b", "1", "--sigma", "3", "--b-sigma", "2"}).code == exit_usage);
  CHECK(run({"derive"}).code == exit_usage);
  CHECK(run({"derive", "--b", "1"}).code == exit_usage);
  CHECK(run({"derive", "--b-sigma", "-1"}).code == exit_usage);
  CHECK(run({"derive", "--pump-waist", "1e-3"}).code == exit_usage);
  CHECK(run({"derive", "--bogus", "1"}).code == exit_usage);
  CHECK(run({}).code == exit_usage);
  CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("cli spectrum") {
  auto r = run({"spectrum", "--b-sigma", "0.3333333333", "--basis", "polar", "--max-order", "1"});
  REQUIRE(r.code == exit_ok);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"ell", "p", "order", "lambda", "cumulative"});
  CHECK(std::stod(rows[1][3]) == doctest::Approx(0.5625).epsilon(1e-9));
  CHECK(std::stod(rows[2][3]) == doctest::Approx(0.140625).epsilon(1e-9));
  CHECK(std::stod(rows[3][3]) == doctest::Approx(0.140625).epsilon(1e-9));
  CHECK(rows[4][0] == "tail");
  CHECK(std::stod(rows[4][4]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Json::parse(r.err)["command"] == "spectrum");

  rows = csv_rows(run({"spectrum", "--b-sigma", "1"}).out);
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][3]) == 1.0);

  std::map<int, double> sums[2];
  int which = 0;
  for (const char* basis : {"cartesian", "polar"}) {
    const auto j = json_of(run({"spectrum", "--b-sigma", "0.2", "--basis", basis, "--format", "json"}));
    for (const auto& e : j["entries"]) sums[which][e["order"].get<int>()] += e["lambda"].get<double>();
    ++which;
  }
  CHECK(sums[0].size() == sums[1].size());
  for (const auto& [order, total] : sums[0]) CHECK(total == doctest::Approx(sums[1][order]).epsilon(1e-14));

  CHECK(run({"spectrum", "--b-sigma", "0"}).code == exit_usage);
  CHECK(run({"spectrum", "--b-sigma", "-2"}).code == exit_usage);
  CHECK(run({"spectrum", "--b-sigma", "0.5", "--max-order", "2", "--tail", "1e-9"}).code == exit_usage);
  CHECK(run({"spectrum", "--b-sigma", "0.5", "--basis", "spherical"}).code == exit_usage);
  CHECK(run({"spectrum", "--b-sigma", "0.5", "--max-order", "5000"}).code == exit_usage);
}

TEST_CASE("cli entropy") {
  auto j = json_of(run({"entropy", "--b-sigma", "0.3333333333", "--alpha", "2"}));
  CHECK(j["H_2"].get<double>() == doctest::Approx(1.47393).epsilon(1e-5));
  CHECK(j["K"].get<double>() == doctest::Approx(2.77778).epsilon(1e-5));
  CHECK(j["S_exact"].get<double>() == doctest::Approx(2.16341).epsilon(1e-5));

  j = json_of(run({"entropy", "--b-sigma", "1"}));
  CHECK(j["K"].get<double>() == 1.0);
  CHECK(j["S_exact"].get<double>() == 0.0);
  for (const char* key : {"H_0.5", "H_2", "H_3"}) CHECK(j[key].get<double>() == 0.0);

  j = json_of(run({"entropy", "--k", "4"}));
  CHECK(j["S_approx_eq21"].get<double>() == 3.0);
  CHECK(j["b_sigma"].get<double>() == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-14));

  j = json_of(run({"entropy", "--b-sigma", "0.3333333333", "--alpha", "2", "--paper-literal"}));
  CHECK(j["H_2"].get<double>() == doctest::Approx(-1.47393).epsilon(1e-5));
  CHECK(j["renyi_form"] == "paper_literal");

  CHECK(run({"entropy"}).code == exit_usage);
  CHECK(run({"entropy", "--k", "4", "--b-sigma", "1"}).code == exit_usage);
  CHECK(run({"entropy", "--k", "0.5"}).code == exit_usage);
  CHECK(run({"entropy", "--b-sigma", "0.5", "--alpha", "1"}).code == exit_usage);
}

TEST_CASE("cli sweep") {
  auto r = run({"sweep", "--b-sigma-min", "0.01", "--b-sigma-max", "100", "--points", "41", "--log"});
  REQUIRE(r.code == exit_ok);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 42);
  CHECK(rows[0] == std::vector<std::string>{"b_sigma", "K", "S_exact", "S_approx_eq21", "S_expansion_eq22"});
  for (int i = 1; i <= 41; ++i)
    for (int c = 1; c <= 4; ++c) CHECK(std::abs(std::stod(rows[i][c]) - std::stod(rows[42 - i][c])) <= 1e-12);
  CHECK(std::stod(rows[21][0]) == 1.0);
  CHECK(std::stod(rows[21][2]) == 0.0);
  CHECK(std::stod(rows[21][3]) == 1.0);
  for (int i = 2; i <= 21; ++i) CHECK(std::stod(rows[i][2]) < std::stod(rows[i - 1][2]));
  for (int i = 22; i <= 41; ++i) CHECK(std::stod(rows[i][2]) > std::stod(rows[i - 1][2]));

  CHECK(run({"sweep", "--b-sigma-min", "2", "--b-sigma-max", "1"}).code == exit_usage);
  CHECK(run({"sweep", "--b-sigma-min", "1", "--b-sigma-max", "1"}).code == exit_usage);
  CHECK(run({"sweep", "--b-sigma-min", "0", "--b-sigma-max", "1"}).code == exit_usage);
  CHECK(run({"sweep", "--points", "1"}).code == exit_usage);
}

TEST_CASE("cli retention") {
  auto r = run({"retention", "--eta", "0.5,1", "--k-min", "256", "--k-max", "1024", "--points", "3", "--log"});
  REQUIRE(r.code == exit_ok);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"K", "b_sigma", "approx_eq21_eta_0.5", "exact_spectrum_eta_0.5",
                                            "approx_eq21_eta_1", "exact_spectrum_eta_1"});
  CHECK(std::stod(rows[2][0]) == doctest::Approx(512.0).epsilon(1e-13));
  CHECK(std::stod(rows[2][2]) == doctest::Approx(0.9).epsilon(1e-13));
  CHECK(std::stod(rows[1][2]) < 0.9);
  CHECK(std::stod(rows[3][2]) > 0.9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][4]) == 1.0);
    CHECK(std::stod(rows[i][5]) == 1.0);
  }

  rows = csv_rows(run({"retention", "--eta", "0.25", "--k-min", "1", "--k-max", "8", "--points", "8",
                       "--model", "approx_eq21"})
                      .out);
  CHECK(rows[0].size() == 3);
  CHECK(rows[1][2].empty());
  CHECK_FALSE(rows[8][2].empty());

  rows = csv_rows(run({"retention", "--b-sigma-min", "0.01", "--b-sigma-max", "1", "--points", "5"}).out);
  CHECK(std::stod(rows[5][0]) == 1.0);

  CHECK(run({"retention", "--eta", "1.5"}).code == exit_usage);
  CHECK(run({"retention", "--k-min", "2", "--b-sigma-min", "0.1"}).code == exit_usage);
  CHECK(run({"retention", "--model", "other"}).code == exit_usage);
  CHECK(run({"retention", "--k-min", "0.5", "--k-max", "2"}).code == exit_usage);
}

TEST_CASE("cli modes") {
  auto rows = csv_rows(run({"modes", "--basis", "lg", "--ell", "0", "--p", "0", "--grid", "21"}).out);
  REQUIRE(rows.size() == 1 + 21 * 21);
  double best = -1;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::stod(rows[i][2]) > best) best = std::stod(rows[i][2]), arg = i;
  CHECK(std::stod(rows[arg][0]) == 0.0);
  CHECK(std::stod(rows[arg][1]) == 0.0);

  rows = csv_rows(run({"modes", "--basis", "hg", "--m", "1", "--n", "0", "--grid", "11"}).out);
  for (int iy = 0; iy < 11; ++iy)
    for (int ix = 0; ix < 11; ++ix) {
      const double v = std::stod(rows[1 + iy * 11 + ix][2]);
      const double mirrored = std::stod(rows[1 + iy * 11 + (10 - ix)][2]);
      CHECK(v == doctest::Approx(-mirrored).epsilon(1e-14));
    }

  const auto direct = csv_rows(run({"modes", "--ell", "1", "--p", "0", "--grid", "15"}).out);
  const auto via = csv_rows(run({"modes", "--ell", "1", "--p", "0", "--grid", "15", "--via-hg"}).out);
  REQUIRE(direct.size() == via.size());
  for (std::size_t i = 1; i < direct.size(); ++i) {
    CHECK(std::abs(std::stod(direct[i][2]) - std::stod(via[i][2])) < 1e-8);
    CHECK(std::abs(std::stod(direct[i][3]) - std::stod(via[i][3])) < 1e-8);
  }
  CHECK(run({"modes", "--grid", "1"}).code == exit_usage);
  CHECK(run({"modes", "--basis", "hg", "--via-hg"}).code == exit_usage);
  CHECK(run({"modes", "--basis", "lg", "--p", "-1"}).code == exit_usage);
}

TEST_CASE("cli verify") {
  auto r = run({"verify", "--b-sigma", "0.3333333333", "--grid", "200"});
  CHECK(r.code == exit_ok);
  auto j = json_of(r);
  CHECK(j["max_sv_rel_err"].get<double>() < 1e-6);
  CHECK(j["mehler_max_rel_err"].get<double>() < 1e-9);
  CHECK(j["hardy_hille_max_rel_err"].get<double>() < 1e-9);
  CHECK(j["passed"] == true);

  r = run({"verify", "--b-sigma", "1", "--grid", "64"});
  CHECK(r.code == exit_ok);
  CHECK(json_of(r)["hardy_hille_max_rel_err"].is_null());

  // A coarse grid cannot resolve a spectrum this wide.
  r = run({"verify", "--b-sigma", "0.02", "--grid", "40", "--samples", "20"});
  CHECK(r.code == exit_verification_failed);
  CHECK(json_of(r)["passed"] == false);

  CHECK(run({"verify", "--b-sigma", "0.5", "--grid", "8"}).code == exit_usage);
  CHECK(run({"verify"}).code == exit_usage);
}

TEST_CASE("cli convert") {
  auto j = json_of(run({"convert", "--order", "0"}));
  CHECK(j["real"] == Json::parse("[[1.0]]"));
  CHECK(j["imag"] == Json::parse("[[0.0]]"));
  j = json_of(run({"convert", "--order", "1"}));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(std::hypot(j["real"][r][c].get<double>(), j["imag"][r][c].get<double>()) ==
            doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(j["unitarity_residual"].get<double>() < 1e-10);
  CHECK(run({"convert", "--order", "61"}).code == exit_usage);
  CHECK(run({"convert", "--order", "-1"}).code == exit_usage);
  CHECK(run({"convert"}).code == exit_usage);
}

TEST_CASE("cli output is deterministic across runs and thread counts") {
  const std::vector<std::vector<std::string>> commands{
      {"derive", "--b", "0.3", "--sigma", "2"},
      {"spectrum", "--b-sigma", "0.2", "--basis", "polar"},
      {"entropy", "--b-sigma", "0.07", "--alpha", "0.5,2,5"},
      {"sweep", "--points", "57", "--log"},
      {"retention", "--points", "33", "--log"},
      {"convert", "--order", "4"},
  };
  for (const auto& c : commands) {
    setenv("SCHMIDTLAB_THREADS", "1", 1);
    const Run a = run(c);
    setenv("SCHMIDTLAB_THREADS", "4", 1);
    const Run b = run(c);
    const Run again = run(c);
    CHECK(a.code == exit_ok);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
    CHECK(b.out == again.out);
  }
  unsetenv("SCHMIDTLAB_THREADS");
}

TEST_CASE("worker count honours the environment") {
  setenv("SCHMIDTLAB_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("SCHMIDTLAB_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);
  unsetenv("SCHMIDTLAB_THREADS");
}

TEST_CASE("file output carries a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "schmidtlab_cli_test";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "sweep.csv";
  REQUIRE(run({"sweep", "--points", "5", "--out", csv.string()}).code == exit_ok);
  const auto manifest = Json::parse(slurp(csv.string() + ".manifest.json"));
  CHECK(manifest["command"] == "sweep");
  CHECK(manifest["parameters"]["points"] == 5);
  CHECK(manifest["parameters"]["log"] == false);
  CHECK(manifest["output_checksum"] == io::checksum(slurp(csv)));

  const auto js = dir / "entropy.json";
  REQUIRE(run({"entropy", "--k", "9", "--out", js.string()}).code == exit_ok);
  auto doc = Json::parse(slurp(js));
  const auto embedded = doc["manifest"];
  doc.erase("manifest");
  CHECK(embedded["output_checksum"] == io::checksum(io::write_json(doc)));
  std::filesystem::remove_all(dir);
}
