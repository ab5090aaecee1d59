#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fhtc/cpfsk.hpp"
#include "fhtc/error.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace fhtc;
using namespace fhtc::cpfsk;

namespace {

const CapacityTable& shipped() {
  static const CapacityTable t = load_table(std::filesystem::path(FHTC_SOURCE_DIR) / "data" / "capacity_table.csv");
  return t;
}

double log_i0(double x) {
  // exp(-x) I0(x) stays finite; I0 itself is fine below ~700.
  return std::log(boost::math::cyl_bessel_i(0, x));
}

// Orthogonal tones (h = 1): the correct correlator envelope is Rician and the
// other Rayleigh, independent. Rate = 1 - E[log2(1 + I0(2g r1) / I0(2g r0))].
double orthogonal_rate(double gamma) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double top = 1.0 + 10.0 / std::sqrt(gamma);
  auto outer = [&](double r0) {
    const double p0 = 2 * gamma * r0 * std::exp(-gamma * (r0 * r0 + 1) + log_i0(2 * gamma * r0));
    auto inner = [&](double r1) {
      const double p1 = 2 * gamma * r1 * std::exp(-gamma * r1 * r1);
      const double d = log_i0(2 * gamma * r1) - log_i0(2 * gamma * r0);
      return p1 * std::log2(1 + std::exp(d));
    };
    return p0 * GK::integrate(inner, 0.0, top, 12, 1e-12);
  };
  return 1 - GK::integrate(outer, 0.0, top, 12, 1e-12);
}

CapacityTable affine_table() {
  CapacityTable t;
  t.h = {0.2, 0.4, 0.6};
  t.gamma_db = {0.0, 1.0, 2.0, 3.0};
  for (double h : t.h)
    for (double g : t.gamma_db) t.rates.push_back(0.1 + 0.5 * h + 0.05 * g);
  return t;
}

}  // namespace

TEST_CASE("tone correlation") {
  CHECK(tone_correlation(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tone_correlation(0.5) == doctest::Approx(2 / std::numbers::pi).epsilon(1e-15));
  CHECK(tone_correlation(0.0) == 1.0);
}

TEST_CASE("capacity estimator limits") {
  CHECK(estimate_capacity(0.7, 1e-4, 20000, RngStream(1, 0)) < 0.01);
  CHECK(estimate_capacity(1.0, 1e4, 20000, RngStream(1, 0)) > 0.999);
  CHECK(estimate_capacity(0.01, 1.0, 20000, RngStream(1, 0)) < 0.01);
  const double mid = estimate_capacity(1.0, to_linear(Db{3.7}), 200000, RngStream(1, 1));
  CHECK(mid >= 0.45);
  CHECK(mid <= 0.55);
  CHECK_THROWS_AS(estimate_capacity(0.0, 1.0, 10000, RngStream(1, 0)), InvalidArgument);
  CHECK_THROWS_AS(estimate_capacity(1.2, 1.0, 10000, RngStream(1, 0)), InvalidArgument);
}

TEST_CASE("capacity estimator against the orthogonal-tone integral") {
  // Per-sample losses lie in [0, 1], so the standard error is below 0.5/sqrt(N).
  const std::uint64_t n = 200000;
  const double tol = 4 * 0.5 / std::sqrt(double(n));
  for (double gdb : {-2.0, 0.0, 3.7, 8.0}) {
    INFO("gamma_dB = " << gdb);
    const double exact = orthogonal_rate(to_linear(Db{gdb}));
    CHECK(std::fabs(estimate_capacity(1.0, to_linear(Db{gdb}), n, RngStream(77, 0)) - exact) <= tol);
    CHECK(std::fabs(capacity(shipped(), 1.0, Db{gdb}) - exact) <= tol);
  }
}

TEST_CASE("bilinear interpolation") {
  const auto t = affine_table();
  CHECK(capacity(t, 0.4, Db{2.0}) == t.at(1, 2));
  CHECK(capacity(t, 0.3, Db{1.5}) == doctest::Approx(0.1 + 0.15 + 0.075).epsilon(1e-14));
  CHECK(capacity(t, 0.5, Db{0.0}) == doctest::Approx(0.35).epsilon(1e-14));
  CHECK_THROWS_AS(capacity(t, 0.7, Db{1.0}), OutOfRange);
  CHECK_THROWS_AS(capacity(t, 0.3, Db{-0.5}), OutOfRange);

  const auto& s = shipped();
  for (std::size_t i : {1u, 37u, 59u, 100u})
    for (std::size_t j : {0u, 57u, 180u}) CHECK(capacity(s, s.h[i], Db{s.gamma_db[j]}) == s.at(i, j));
}

TEST_CASE("interpolated table against fresh estimates") {
  const auto& s = shipped();
  RngStream r(8, 0);
  for (int k = 0; k < 6; ++k) {
    const double h = 0.05 + 0.95 * r.uniform(), gdb = -3.5 + 17 * r.uniform();
    const auto ih = static_cast<std::size_t>(std::floor(h / 0.01 + 1e-9));
    const auto ig = static_cast<std::size_t>(std::floor((gdb + 4) / 0.1 + 1e-9));
    double lo = 1, hi = 0;
    for (std::size_t a : {ih, ih + 1})
      for (std::size_t b : {ig, ig + 1}) {
        lo = std::min(lo, s.at(a, b));
        hi = std::max(hi, s.at(a, b));
      }
    const double fresh = estimate_capacity(h, to_linear(Db{gdb}), 200000, RngStream(900 + k, 0));
    INFO("h = " << h << " gamma_dB = " << gdb);
    CHECK(std::fabs(capacity(s, h, Db{gdb}) - fresh) <= (hi - lo) + 4 * 0.5 / std::sqrt(200000.0));
  }
}

TEST_CASE("sinr threshold") {
  const auto& s = shipped();
  const double b0 = to_db(sinr_threshold(s, 1.0, 0.5, 0.0)).value;
  CHECK(b0 >= 3.2);
  CHECK(b0 <= 4.2);
  const double b1 = to_db(sinr_threshold(s, 1.0, 0.5, 1.0)).value;
  CHECK(b1 - b0 == doctest::Approx(1.0).epsilon(1e-12));

  for (double h : {0.3, 0.59, 1.0}) {
    double prev = -100;
    for (double rate = 0.05; rate < 0.9; rate += 0.05) {
      const double b = to_db(sinr_threshold(s, h, rate)).value;
      CHECK(b >= prev);
      prev = b;
      // Round trip: the interpolated rate at the threshold reaches R, and one
      // grid step lower it does not.
      CHECK(capacity(s, h, Db{b}) >= rate - 1e-12);
      if (b - 0.1 >= s.gamma_db.front()) CHECK(capacity(s, h, Db{b - 0.1}) < rate);
    }
  }
  CHECK(to_db(sinr_threshold(s, 1.0, 1e-9)).value == doctest::Approx(s.gamma_db.front()).epsilon(1e-6));
  CHECK_THROWS_AS(sinr_threshold(s, 0.05, 0.99), RateUnachievable);
  CHECK_THROWS_AS(sinr_threshold(s, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(sinr_threshold(s, 1.0, 0.5, -1.0), InvalidArgument);
}

TEST_CASE("isotonic cleanup") {
  std::vector<double> v{1, 3, 2, 4};
  CHECK(isotonic_nondecreasing(v) == 2);
  CHECK(v == std::vector<double>{1, 2.5, 2.5, 4});
  std::vector<double> w{5, 4, 3};
  isotonic_nondecreasing(w);
  CHECK(w == std::vector<double>{4, 4, 4});
  std::vector<double> sorted{0, 0.1, 0.1, 0.7};
  CHECK(isotonic_nondecreasing(sorted) == 0);
}

TEST_CASE("table build") {
  const std::vector<double> hs{0.0, 0.5, 1.0}, gs{-2.0, 0.0, 2.0, 4.0};
  const auto a = build_table(hs, gs, 20000, 99, 3);
  const auto b = build_table(hs, gs, 20000, 99, 1);
  CHECK(a.rates == b.rates);
  CHECK_NOTHROW(a.validate());
  for (std::size_t j = 0; j < gs.size(); ++j) CHECK(a.at(0, j) == 0.0);
  CHECK(a.meta.samples == 20000);
  CHECK(a.meta.seed == 99);

  const std::vector<double> h1{0.7}, g1{1.0};
  const auto one = build_table(h1, g1, 20000, 5);
  CHECK(one.rates.size() == 1);
  CHECK(one.rates[0] == estimate_capacity(0.7, to_linear(Db{1.0}), 20000, RngStream(5, 0)));

  const auto& s = shipped();
  CHECK_NOTHROW(s.validate());
  CHECK(s.h.size() == 101);
  CHECK(s.gamma_db.size() == 181);
  CHECK(s.meta.samples == 200000);
}

TEST_CASE("table persistence") {
  const auto dir = std::filesystem::temp_directory_path() / "fhtc_test_cpfsk";
  std::filesystem::create_directories(dir);
  const std::vector<double> hs{0.1, 0.55, 1.0}, gs{-1.0, 0.3, 7.0};
  const auto t = build_table(hs, gs, 10000, 3);
  save_table(t, dir / "t.csv");
  const auto u = load_table(dir / "t.csv");
  CHECK(u.h == t.h);
  CHECK(u.gamma_db == t.gamma_db);
  CHECK(u.rates == t.rates);
  CHECK(u.meta.seed == t.meta.seed);
  CHECK(u.meta.build_timestamp == t.meta.build_timestamp);

  std::filesystem::copy_file(dir / "t.csv", dir / "orphan.csv", std::filesystem::copy_options::overwrite_existing);
  std::filesystem::remove(dir / "orphan.json");
  CHECK_THROWS_AS(load_table(dir / "orphan.csv"), FormatError);

  std::string text;
  {
    std::ifstream is(dir / "t.csv");
    std::stringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  const auto pos = text.rfind(',');
  std::ofstream(dir / "bad.csv") << text.substr(0, pos + 1) << "x1\n";
  std::filesystem::copy_file(dir / "t.json", dir / "bad.json", std::filesystem::copy_options::overwrite_existing);
  CHECK_THROWS_AS(load_table(dir / "bad.csv"), FormatError);
}

TEST_CASE("power spectral density") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double h : {0.3, 0.5, 0.8}) {
    auto f = [&](double x) { return psd(h, x); };
    // Total power is one; the tail beyond |f| = 40 is below 1e-4.
    double total = 0;
    for (int k = 0; k < 320; ++k) total += GK::integrate(f, k * 0.125, (k + 1) * 0.125, 10, 1e-12);
    CHECK(2 * total == doctest::Approx(1.0).epsilon(2e-4));
    CHECK(psd(h, 0.37) == doctest::Approx(psd(h, -0.37)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(psd(1.0, 0.1), InvalidArgument);
}

TEST_CASE("occupied bandwidth against the autocorrelation oracle") {
  for (double h : {0.05, 0.2, 0.5, 0.7, 0.95}) {
    INFO("h = " << h);
    CHECK(occupied_bandwidth(h, 0.99) == doctest::Approx(oracle::cpfsk_occupied_bandwidth(h, 0.99)).epsilon(1e-8));
  }
  CHECK(occupied_bandwidth(0.5, 0.9) < occupied_bandwidth(0.5, 0.99));
}

TEST_CASE("spectral efficiency") {
  // MSK: 99% bandwidth about 1.18 times the symbol rate.
  CHECK(spectral_efficiency(0.5) == doctest::Approx(0.846).epsilon(1e-3));
  double prev = 1e9;
  for (int i = 10; i <= 100; ++i) {
    const double eta = spectral_efficiency(i / 100.0);
    CHECK(eta <= prev);
    prev = eta;
  }
  CHECK(spectral_efficiency(0.01) > spectral_efficiency(0.02));
  CHECK(spectral_efficiency(0.37) == spectral_efficiency(0.37));

  std::ifstream is(std::filesystem::path(FHTC_SOURCE_DIR) / "data" / "golden.json");
  const auto golden = nlohmann::json::parse(is)["spectral_efficiency"];
  CHECK(spectral_efficiency(1.0) == doctest::Approx(golden["h=1"].get<double>()).epsilon(1e-9));
  CHECK(spectral_efficiency(0.5) == doctest::Approx(golden["h=0.5"].get<double>()).epsilon(1e-9));
}
