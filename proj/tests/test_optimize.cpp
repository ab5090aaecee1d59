#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "fhtc/error.hpp"
#include "fhtc/optimize.hpp"
#include "fhtc/outage.hpp"

using namespace fhtc;
using namespace fhtc::opt;

namespace {

std::shared_ptr<const cpfsk::CapacityTable> shipped() {
  static const auto t = std::make_shared<const cpfsk::CapacityTable>(
      cpfsk::load_table(std::filesystem::path(FHTC_SOURCE_DIR) / "data" / "capacity_table.csv"));
  return t;
}

Scenario bpp_scenario() {
  Scenario s;
  s.process = net::Bpp{50};
  s.geom = {0.25, 1.0};
  s.alpha = 3.0;
  s.gamma_snr = 10.0;
  s.table = shipped();
  return s;
}

Scenario ppp_scenario() {
  Scenario s = bpp_scenario();
  s.process = net::Ppp{1.0};
  s.geom = {0.25, 2.0};
  return s;
}

// The pipeline spelled out from the public closed forms.
double brute_tau(double beta_db, double h, int lprime, const Scenario& s) {
  const double rate = cpfsk::capacity(*s.table, h, Db{beta_db - s.margin_db});
  const double eta = cpfsk::spectral_efficiency(h);
  outage::OutageQuery q;
  q.beta = std::pow(10.0, beta_db / 10);
  q.z = 1 / s.gamma_snr;
  q.params.alpha = s.alpha;
  q.params.gamma_snr = s.gamma_snr;
  q.params.channels = lprime;
  double eps, lambda;
  if (const auto* b = std::get_if<net::Bpp>(&s.process)) {
    eps = outage::bpp_outage(q, s.geom, b->m);
    lambda = b->m / (std::numbers::pi * s.geom.r_net * s.geom.r_net);
  } else {
    lambda = std::get<net::Ppp>(s.process).lambda;
    eps = outage::ppp_outage(q, s.geom, lambda);
  }
  return lambda * rate * eta * (1 - eps) / lprime;
}

SearchGrid small_grid() {
  SearchGrid g;
  g.beta_min_db = 0.0;
  g.beta_max_db = 8.0;
  g.beta_step_db = 0.5;
  g.h_min = 0.3;
  g.h_max = 1.0;
  g.h_step = 0.05;
  g.lprime_min = 1;
  g.lprime_max = 60;
  return g;
}

}  // namespace

TEST_CASE("grid geometry") {
  const SearchGrid g;
  CHECK(g.n_beta() == 141);
  CHECK(g.n_h() == 100);
  CHECK(g.n_lprime() == 200);
  CHECK(g.size() == 2820000);
  CHECK(g.h(58) == 0.59);
  CHECK(g.beta_db(37) == 1.7);
  SearchGrid bad = g;
  bad.h_max = 1.2;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = g;
  bad.lprime_min = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("objective against the spelled-out pipeline") {
  for (const auto& s : {bpp_scenario(), ppp_scenario()}) {
    for (auto [b, h, l] : {std::tuple{2.0, 0.59, 40}, std::tuple{-1.3, 0.2, 1}, std::tuple{9.9, 1.0, 200}}) {
      CHECK(objective(b, h, l, s) == doctest::Approx(brute_tau(b, h, l, s)).epsilon(1e-12));
    }
  }
  // Collision-free limit: only the noise floor remains.
  const auto s = bpp_scenario();
  const double floor_eps = 1 - std::exp(-std::pow(10.0, 0.2) / 10);
  const double want = 50 / std::numbers::pi * cpfsk::capacity(*s.table, 0.5, Db{2.0}) *
                      cpfsk::spectral_efficiency(0.5) * (1 - floor_eps) / 1e12;
  CHECK(objective(2.0, 0.5, 1e12, s) == doctest::Approx(want).epsilon(1e-9));
  CHECK_THROWS_AS(objective(2.0, 0.5, 0.5, s), InvalidArgument);
}

TEST_CASE("objective increases with snr") {
  auto s = bpp_scenario();
  double prev = 0;
  for (double gdb : {0.0, 5.0, 10.0, 15.0, 20.0}) {
    s.gamma_snr = std::pow(10.0, gdb / 10);
    const double v = objective(3.0, 0.6, 30, s);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("single-point grid") {
  SearchGrid g;
  g.beta_min_db = g.beta_max_db = 2.5;
  g.h_min = g.h_max = 0.61;
  g.lprime_min = g.lprime_max = 33;
  const auto s = bpp_scenario();
  for (const auto& r : {exhaustive_search(g, s), gradient_search(g, s)}) {
    CHECK(r.lprime == 33);
    CHECK(r.h == 0.61);
    CHECK(r.beta_db == 2.5);
    CHECK(r.tau_prime == objective(2.5, 0.61, 33, s));
    CHECK(r.evaluations == 1);
  }
}

TEST_CASE("coarse grid against brute force") {
  SearchGrid g;
  g.beta_min_db = -2.0;
  g.beta_max_db = 10.0;
  g.beta_step_db = 3.0;
  g.h_min = 0.2;
  g.h_max = 1.0;
  g.h_step = 0.2;
  g.lprime_min = 18;
  g.lprime_max = 22;
  for (const auto& s : {bpp_scenario(), ppp_scenario()}) {
    double best = -1;
    double bb = 0, bh = 0;
    int bl = 0;
    for (int l = 18; l <= 22; ++l)
      for (double h : {0.2, 0.4, 0.6, 0.8, 1.0})
        for (double b : {-2.0, 1.0, 4.0, 7.0, 10.0}) {
          const double v = brute_tau(b, h, l, s);
          if (v > best) {
            best = v;
            bb = b;
            bh = h;
            bl = l;
          }
        }
    const auto r = exhaustive_search(g, s, 3);
    CHECK(r.tau_prime == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.beta_db == bb);
    CHECK(r.h == bh);
    CHECK(r.lprime == bl);
    CHECK(r.evaluations == 125);
  }
}

TEST_CASE("gradient search matches exhaustive search") {
  const auto g = small_grid();
  for (auto s : {bpp_scenario(), ppp_scenario()}) {
    for (double margin : {0.0, 1.0}) {
      s.margin_db = margin;
      const GridObjective f(g, s, 2);
      const auto e = exhaustive_search(f, 2);
      const auto d = gradient_search(f);
      CHECK(d.tau_prime == e.tau_prime);
      CHECK(d.i_beta == e.i_beta);
      CHECK(d.i_h == e.i_h);
      CHECK(d.i_lprime == e.i_lprime);
      CHECK(d.evaluations < g.size() / 5);
      CHECK(d.iterations > 0);
      for (const auto& r : {e, d}) {
        CHECK(r.rate == cpfsk::capacity(*s.table, r.h, Db{r.beta_db - margin}));
        CHECK(r.tau_prime == objective(r.beta_db, r.h, r.lprime, s));
      }
    }
  }
}

TEST_CASE("grid objective equals the pointwise objective") {
  const auto g = small_grid();
  const auto s = ppp_scenario();
  const GridObjective f(g, s);
  for (std::size_t ib : {0u, 7u, 16u})
    for (std::size_t ih : {0u, 5u, 14u})
      for (std::size_t il : {0u, 30u, 59u}) CHECK(f(ib, ih, il) == objective(g.beta_db(ib), g.h(ih), g.lprime(il), s));
}

TEST_CASE("constant objective") {
  auto zero = std::make_shared<cpfsk::CapacityTable>();
  zero->h = {0.0, 1.0};
  zero->gamma_db = {-10.0, 20.0};
  zero->rates = {0, 0, 0, 0};
  auto s = bpp_scenario();
  s.table = zero;
  const auto g = small_grid();
  const auto e = exhaustive_search(g, s);
  CHECK(e.tau_prime == 0.0);
  CHECK(e.i_beta == 0);
  CHECK(e.i_h == 0);
  CHECK(e.i_lprime == 0);
  const auto d = gradient_search(g, s);
  CHECK(d.tau_prime == 0.0);
  // Every bracket shrinks on its first look, so the search touches only a
  // logarithmic number of points per axis.
  CHECK(d.iterations <= 13 * 13);
  CHECK(d.evaluations <= 13 * 13 * 15);
  s.table = shipped();
  CHECK(d.iterations < gradient_search(g, s).iterations);
}

TEST_CASE("determinism") {
  const auto g = small_grid();
  const auto s = bpp_scenario();
  const auto a = exhaustive_search(g, s, 1), b = exhaustive_search(g, s, 4);
  CHECK(a.tau_prime == b.tau_prime);
  CHECK(a.i_beta == b.i_beta);
  CHECK(a.i_h == b.i_h);
  CHECK(a.i_lprime == b.i_lprime);
  const auto c = gradient_search(g, s), d = gradient_search(g, s);
  CHECK(c.tau_prime == d.tau_prime);
  CHECK(c.evaluations == d.evaluations);
  CHECK(c.iterations == d.iterations);
}

TEST_CASE("profiles and rate sweep") {
  const auto g = small_grid();
  const auto s = bpp_scenario();
  const GridObjective f(g, s);
  const auto p = exhaustive_profiles(f, 2);
  const auto e = exhaustive_search(f);
  CHECK(p.vs_beta.x.size() == g.n_beta());
  CHECK(p.vs_h.x.size() == g.n_h());
  CHECK(p.vs_lprime.x.size() == g.n_lprime());
  double top = 0;
  for (const auto& r : p.vs_h.best) top = std::max(top, r.tau_prime);
  CHECK(top == e.tau_prime);
  CHECK(p.vs_lprime.best[e.i_lprime].tau_prime == e.tau_prime);

  const auto rp = rate_profile(g, s, {0.2, 0.5, 0.8});
  CHECK(rp.x.size() == 3);
  for (std::size_t k = 0; k < rp.x.size(); ++k) {
    const auto& r = rp.best[k];
    CHECK(r.tau_prime == tau_at_rate(rp.x[k], r.h, r.lprime, s));
    CHECK(cpfsk::capacity(*s.table, r.h, Db{r.beta_db}) >= rp.x[k] - 1e-12);
  }
}

TEST_CASE("scenario validation") {
  auto s = bpp_scenario();
  s.table = nullptr;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = bpp_scenario();
  s.alpha = 2.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = bpp_scenario();
  s.bpp_density = BppDensity::Annulus;
  CHECK(s.density() == doctest::Approx(50 / s.geom.area()).epsilon(1e-15));
  CHECK(s.bpp_count() == doctest::Approx(50).epsilon(1e-14));
  s.bpp_density = BppDensity::NetworkDisk;
  CHECK(s.density() == doctest::Approx(50 / std::numbers::pi).epsilon(1e-15));
  CHECK(s.bpp_count() == 50);
}
