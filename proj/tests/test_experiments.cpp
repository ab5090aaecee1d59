#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fhtc/error.hpp"
#include "fhtc/experiments.hpp"

using namespace fhtc;
using namespace fhtc::exp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fhtc_test_experiments" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string table_path() { return (fs::path(FHTC_SOURCE_DIR) / "data" / "capacity_table.csv").string(); }

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::parse_string("# comment\nseed = 7\n\n r_net = 1, 2 ,4\nprocesses = bpp,ppp\nname=x y\n");
  CHECK(c.count("seed", 0) == 7);
  CHECK(c.list("r_net", {}) == std::vector<double>{1, 2, 4});
  CHECK(c.words("processes", {}) == std::vector<std::string>{"bpp", "ppp"});
  CHECK(c.str("name", "") == "x y");
  CHECK(c.num("missing", 2.5) == 2.5);
  CHECK_THROWS_AS(Config::parse_string("seed 7\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string(" = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("x = 1.5q\n").num("x", 0), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("x = -3\n").count("x", 0), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("x = 1,,2\n").list("x", {}), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("bogus = 1\n").check_keys(figure_keys()), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("format_version = 9\n").check_keys(figure_keys()), ConfigError);
  CHECK_NOTHROW(Config::parse_string("format_version = 1\nseed = 3\n").check_keys(figure_keys()));
  CHECK_THROWS_AS(Config::load(scratch("none") / "missing.cfg"), ConfigError);
}

TEST_CASE("figure requests are validated") {
  const auto dir = scratch("invalid");
  CHECK_THROWS_AS(run_figure(1, Config{}, dir), ConfigError);
  CHECK_THROWS_AS(run_figure(0, Config{}, dir), ConfigError);
  CHECK_THROWS_AS(run_figure(16, Config{}, dir), ConfigError);
  CHECK_THROWS_AS(run_figure(8, Config{}, dir), ConfigError);
  CHECK_THROWS_AS(run_figure(6, Config::parse_string("threads = 0\n"), dir), ConfigError);
  CHECK_THROWS_AS(run_figure(6, Config::parse_string("color = red\n"), dir), ConfigError);
}

TEST_CASE("tc figures are byte-identical across runs and keep their orderings") {
  const auto a = scratch("fig6a"), b = scratch("fig6b");
  const auto ra = run_figure(6, Config{}, a);
  const auto rb = run_figure(6, Config{}, b);
  REQUIRE(ra.files.size() == 3);
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    CHECK(ra.files[i].filename() == rb.files[i].filename());
    CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
  }
  const auto& hi = ra.curve("gamma_10db");
  const auto& mid = ra.curve("gamma_0db");
  const auto& lo = ra.curve("gamma_m10db");
  for (std::size_t i = 0; i < hi.rows.size(); ++i) {
    CHECK(hi.value(i) >= mid.value(i));
    CHECK(mid.value(i) >= lo.value(i));
    if (lo.value(i) > 0) {
      CHECK(hi.value(i) > mid.value(i));
      CHECK(mid.value(i) > lo.value(i));
    }
  }

  const auto f7 = run_figure(7, Config{}, scratch("fig7"));
  const auto& r2 = f7.curve("rnet_2");
  const auto& r10 = f7.curve("rnet_10");
  const auto& inf = f7.curve("infinite");
  for (std::size_t i = 0; i < r2.rows.size(); ++i) {
    if (inf.value(i) == 0) continue;
    CHECK(r2.value(i) > r10.value(i));
    CHECK(r10.value(i) > inf.value(i));
  }
  const auto text = slurp(f7.files.front());
  CHECK(text.rfind("# figure = 7\n", 0) == 0);
  CHECK(text.find("x,value,stderr\n") != std::string::npos);
}

TEST_CASE("outage figure with reduced Monte Carlo") {
  const auto dir = scratch("fig2");
  const auto out = run_figure(2, Config::parse_string("seed = 5\nmc_networks = 3000\nthreads = 2\n"), dir);
  CHECK(out.curves.size() == 10);
  for (const char* name : {"lprime_1", "lprime_10", "lprime_200"}) {
    const auto& exact = out.curve(name);
    const auto& mc = out.curve(std::string(name) + "_mc");
    CHECK(exact.rows.size() == 51);
    CHECK(exact.value(0) == doctest::Approx(1 - std::exp(-std::pow(10.0, 0.37) / 10)).epsilon(1e-12));
    for (std::size_t i = 0; i < mc.rows.size(); ++i) {
      const auto m = static_cast<std::size_t>(mc.x(i));
      INFO(name << " m = " << m);
      CHECK(std::fabs(mc.value(i) - exact.value(m)) <= 4 * mc.stderr_(i) + 1e-3);
    }
  }
  // More channels, fewer collisions.
  for (std::size_t m = 1; m <= 50; ++m) CHECK(out.curve("lprime_1").value(m) > out.curve("lprime_10").value(m));

  // Thread count does not change the estimates.
  const auto again = run_figure(2, Config::parse_string("seed = 5\nmc_networks = 3000\nthreads = 1\n"), scratch("fig2b"));
  CHECK(out.curve("lprime_50_mc").rows == again.curve("lprime_50_mc").rows);
}

TEST_CASE("conditional outage figure writes its topology") {
  const auto dir = scratch("fig1");
  const auto out = run_figure(1, Config::parse_string("seed = 2\nmc_trials = 20000\n"), dir);
  CHECK(fs::exists(dir / "fig1_topology.csv"));
  const auto& hi = out.curve("beta_10db");
  const auto& lo = out.curve("beta_m10db");
  for (std::size_t i = 0; i < hi.rows.size(); ++i) CHECK(hi.value(i) > lo.value(i));
  const auto& mc = out.curve("beta_0db_mc");
  const auto& exact = out.curve("beta_0db");
  for (std::size_t i = 0; i < mc.rows.size(); ++i) {
    const auto j = static_cast<std::size_t>(std::llround(mc.x(i) + 10));
    CHECK(std::fabs(mc.value(i) - exact.value(j)) <= 4 * mc.stderr_(i) + 1e-4);
  }
}

TEST_CASE("tables") {
  const auto dir = scratch("tables");
  CHECK(run_tables(Config{}, dir).empty());
  const auto header = slurp(dir / "tables.csv");
  CHECK(header.find("process,r_net,r_ex,alpha,tau_exhaustive") != std::string::npos);
  CHECK_THROWS_AS(run_tables(Config::parse_string("processes = mhp\n"), dir), ConfigError);
  CHECK_THROWS_AS(run_tables(Config::parse_string("processes = bpp\n"), dir), ConfigError);

  const auto rows = run_tables(Config::parse_string("processes = bpp\ntable = " + table_path() +
                                                    "\nr_net = 1\nr_ex = 0.25\nalpha = 3\nthreads = 4\n"),
                               dir);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].tau_exhaustive == rows[0].tau_gradient);
  CHECK(rows[0].evaluations_exhaustive == 2820000);
  CHECK(rows[0].evaluations < rows[0].evaluations_exhaustive / 20);
}
