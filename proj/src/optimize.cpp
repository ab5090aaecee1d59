#include "fhtc/optimize.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "fhtc/error.hpp"
#include "fhtc/outage.hpp"
#include "fhtc/parallel.hpp"

namespace fhtc::opt {

namespace {

std::size_t count(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

// Grid coordinates rounded to 1e-9 so that e.g. h = 0.59 comes out as the
// same double as 59 / 100.0 in the table.
double tick(double lo, double step, std::size_t i) { return std::round((lo + i * step) * 1e9) / 1e9; }

double kernel_for(const Scenario& s, double beta_db) {
  return outage::interference_kernel(s.geom, s.alpha, to_linear(Db{beta_db}) * s.omega0);
}

double rate_for(const Scenario& s, double beta_db, double h) {
  return cpfsk::capacity(*s.table, h, Db{beta_db - s.margin_db});
}

// The single composition shared by objective() and GridObjective.
double compose(const Scenario& s, double beta_db, double rate, double eta, double kernel, double lprime) {
  const double b0 = to_linear(Db{beta_db}) * s.omega0;
  const double z = 1.0 / s.gamma_snr;
  const double p = 1.0 / lprime;
  const double density = s.density();
  const double area = s.geom.area();
  const double eps = s.model() == tc::Model::Bpp
                         ? outage::bpp_outage_from_kernel(b0, z, p, kernel, s.bpp_count())
                         : outage::ppp_outage_from_kernel(b0, z, p, kernel, area, density);
  return tc::modconstrained_tc(tc::TcObjective{density, rate, eta, lprime}, eps);
}

// Strict preference under the declared tie-break.
bool better(double v, std::size_t il, std::size_t ih, std::size_t ib, const OptResult& cur) {
  if (v != cur.tau_prime) return v > cur.tau_prime;
  return std::tie(il, ih, ib) < std::tie(cur.i_lprime, cur.i_h, cur.i_beta);
}

OptResult make_result(const GridObjective& f, std::size_t ib, std::size_t ih, std::size_t il, double v) {
  const auto& g = f.grid();
  OptResult r;
  r.i_beta = ib;
  r.i_h = ih;
  r.i_lprime = il;
  r.beta_db = g.beta_db(ib);
  r.h = g.h(ih);
  r.lprime = g.lprime(il);
  r.rate = f.rate(ib, ih);
  r.tau_prime = v;
  return r;
}

OptResult empty_best() {
  OptResult r;
  r.tau_prime = -std::numeric_limits<double>::infinity();
  r.i_beta = r.i_h = r.i_lprime = std::numeric_limits<std::size_t>::max();
  return r;
}

void merge(OptResult& into, const OptResult& other) {
  if (better(other.tau_prime, other.i_lprime, other.i_h, other.i_beta, into)) into = other;
}

// Three-point bracket search over indices 0..n-1 of a function to maximize.
// The mid point wins ties, so a flat function shrinks straight down.
template <class F>
std::pair<std::size_t, double> three_point(std::size_t n, F&& f) {
  if (n == 1) return {0, f(0)};
  std::size_t c = (n - 1) / 2;
  std::size_t s = (n - 1) - c;
  const std::size_t cap = 4 * n + 64;
  for (std::size_t round = 0; round < cap; ++round) {
    const std::size_t lo = c >= s ? c - s : 0;
    const std::size_t hi = std::min(n - 1, c + s);
    const double fl = f(lo), fc = f(c), fh = f(hi);
    if (fc >= fl && fc >= fh) {
      if (s <= 1) return {c, fc};
      s /= 2;
    } else {
      c = fl >= fh ? lo : hi;
    }
  }
  throw NoConvergence("three-point search did not settle");
}

}  // namespace

std::size_t SearchGrid::n_beta() const { return count(beta_min_db, beta_max_db, beta_step_db); }
std::size_t SearchGrid::n_h() const { return count(h_min, h_max, h_step); }
std::size_t SearchGrid::n_lprime() const { return static_cast<std::size_t>(lprime_max - lprime_min + 1); }
double SearchGrid::beta_db(std::size_t i) const { return tick(beta_min_db, beta_step_db, i); }
double SearchGrid::h(std::size_t i) const { return tick(h_min, h_step, i); }

void SearchGrid::validate() const {
  if (!(beta_step_db > 0.0) || !(h_step > 0.0)) throw InvalidArgument("grid: steps must be positive");
  if (!(beta_max_db >= beta_min_db)) throw InvalidArgument("grid: empty beta range");
  if (!(h_min > 0.0 && h_max <= 1.0 && h_max >= h_min)) throw InvalidArgument("grid: h range must lie in (0, 1]");
  if (lprime_min < 1 || lprime_max < lprime_min) throw InvalidArgument("grid: need 1 <= L'_min <= L'_max");
}

tc::Model Scenario::model() const {
  return std::holds_alternative<net::Bpp>(process) ? tc::Model::Bpp : tc::Model::Ppp;
}

double Scenario::density() const {
  if (const auto* b = std::get_if<net::Bpp>(&process)) {
    const double area = bpp_density == BppDensity::NetworkDisk ? std::numbers::pi * geom.r_net * geom.r_net
                                                               : geom.area();
    return b->m / area;
  }
  return std::get<net::Ppp>(process).lambda;
}

double Scenario::bpp_count() const {
  const auto& b = std::get<net::Bpp>(process);
  // Under the annulus convention go through lambda * A, as the TC module does.
  return bpp_density == BppDensity::Annulus ? density() * geom.area() : b.m;
}

void Scenario::validate() const {
  geom.validate();
  if (!table) throw InvalidArgument("scenario: no capacity table");
  if (!(alpha > 2.0)) throw InvalidArgument("scenario: path-loss exponent must exceed 2");
  if (!(gamma_snr > 0.0) || !(omega0 > 0.0)) throw InvalidArgument("scenario: SNR and omega0 must be positive");
  if (!(margin_db >= 0.0)) throw InvalidArgument("scenario: margin must be nonnegative");
  if (!(density() >= 0.0)) throw InvalidArgument("scenario: density must be nonnegative");
}

double objective(double beta_db, double h, double lprime, const Scenario& scenario) {
  scenario.validate();
  if (!(lprime >= 1.0)) throw InvalidArgument("objective: need L' >= 1");
  return compose(scenario, beta_db, rate_for(scenario, beta_db, h), cpfsk::spectral_efficiency(h),
                 kernel_for(scenario, beta_db), lprime);
}

GridObjective::GridObjective(const SearchGrid& grid, const Scenario& scenario, int threads)
    : grid_(grid), scenario_(scenario) {
  grid_.validate();
  scenario_.validate();
  const auto nb = grid_.n_beta(), nh = grid_.n_h();
  kernel_.resize(nb);
  eta_.resize(nh);
  rate_.resize(nb * nh);
  parallel_for(nh, threads, [&](std::uint64_t ih) { eta_[ih] = cpfsk::spectral_efficiency(grid_.h(ih)); });
  parallel_for(nb, threads, [&](std::uint64_t ib) {
    kernel_[ib] = kernel_for(scenario_, grid_.beta_db(ib));
    for (std::size_t ih = 0; ih < nh; ++ih) rate_[ib * nh + ih] = rate_for(scenario_, grid_.beta_db(ib), grid_.h(ih));
  });
}

double GridObjective::operator()(std::size_t ib, std::size_t ih, std::size_t il) const {
  return compose(scenario_, grid_.beta_db(ib), rate_[ib * grid_.n_h() + ih], eta_[ih], kernel_[ib],
                 grid_.lprime(il));
}

OptResult exhaustive_search(const SearchGrid& grid, const Scenario& scenario, int threads) {
  return exhaustive_search(GridObjective(grid, scenario, threads), threads);
}

OptResult exhaustive_search(const GridObjective& f, int threads) {
  const auto& g = f.grid();
  const auto nb = g.n_beta(), nh = g.n_h(), nl = g.n_lprime();
  std::vector<OptResult> slice(nb);
  parallel_for(nb, threads, [&](std::uint64_t ib) {
    OptResult best = empty_best();
    for (std::size_t ih = 0; ih < nh; ++ih)
      for (std::size_t il = 0; il < nl; ++il) {
        const double v = f(ib, ih, il);
        if (better(v, il, ih, ib, best)) best = make_result(f, ib, ih, il, v);
      }
    slice[ib] = best;
  });
  OptResult best = empty_best();
  for (const auto& r : slice) merge(best, r);
  best.evaluations = g.size();
  best.iterations = 0;
  return best;
}

OptResult gradient_search(const SearchGrid& grid, const Scenario& scenario) {
  return gradient_search(GridObjective(grid, scenario, 1));
}

OptResult gradient_search(const GridObjective& f) {
  const auto& g = f.grid();
  const auto nb = g.n_beta(), nh = g.n_h(), nl = g.n_lprime();
  const double unset = std::numeric_limits<double>::quiet_NaN();

  // Every distinct objective evaluation is counted once; repeated visits to
  // a point are served from the memo.
  std::vector<double> memo(g.size(), unset);
  std::uint64_t evaluations = 0;
  auto tau = [&](std::size_t ib, std::size_t ih, std::size_t il) {
    double& slot = memo[(ib * nh + ih) * nl + il];
    if (std::isnan(slot)) {
      slot = f(ib, ih, il);
      ++evaluations;
    }
    return slot;
  };

  // One iteration = one resolved L' search at a fresh (beta, h).
  std::vector<std::pair<std::size_t, double>> best_l(nb * nh, {0, unset});
  std::uint64_t iterations = 0;
  auto over_l = [&](std::size_t ib, std::size_t ih) {
    auto& cell = best_l[ib * nh + ih];
    if (std::isnan(cell.second)) {
      cell = three_point(nl, [&](std::size_t il) { return tau(ib, ih, il); });
      ++iterations;
    }
    return cell;
  };
  std::vector<std::pair<std::size_t, double>> best_h(nb, {0, unset});
  auto over_h = [&](std::size_t ib) {
    auto& cell = best_h[ib];
    if (std::isnan(cell.second)) cell = three_point(nh, [&](std::size_t ih) { return over_l(ib, ih).second; });
    return cell;
  };

  // Outer passes repeat until the optimal triple comes back unchanged.
  constexpr int kMaxOuter = 10000;
  std::tuple<std::size_t, std::size_t, std::size_t> prev{nb, nh, nl};
  for (int pass = 0; pass < kMaxOuter; ++pass) {
    const auto [ib, v] = three_point(nb, [&](std::size_t i) { return over_h(i).second; });
    const auto ih = over_h(ib).first;
    const auto il = over_l(ib, ih).first;
    const std::tuple cur{ib, ih, il};
    if (cur == prev) {
      OptResult r = make_result(f, ib, ih, il, v);
      r.evaluations = evaluations;
      r.iterations = iterations;
      return r;
    }
    prev = cur;
  }
  throw NoConvergence("gradient search exceeded the outer iteration cap");
}

Profiles exhaustive_profiles(const GridObjective& f, int threads) {
  const auto& g = f.grid();
  const auto nb = g.n_beta(), nh = g.n_h(), nl = g.n_lprime();
  // Per beta slice: best per h, per L', and overall; merged afterwards.
  std::vector<std::vector<OptResult>> by_h(nb, std::vector<OptResult>(nh, empty_best()));
  std::vector<std::vector<OptResult>> by_l(nb, std::vector<OptResult>(nl, empty_best()));
  std::vector<OptResult> by_b(nb, empty_best());
  parallel_for(nb, threads, [&](std::uint64_t ib) {
    for (std::size_t ih = 0; ih < nh; ++ih)
      for (std::size_t il = 0; il < nl; ++il) {
        const double v = f(ib, ih, il);
        if (better(v, il, ih, ib, by_h[ib][ih])) by_h[ib][ih] = make_result(f, ib, ih, il, v);
        if (better(v, il, ih, ib, by_l[ib][il])) by_l[ib][il] = make_result(f, ib, ih, il, v);
        if (better(v, il, ih, ib, by_b[ib])) by_b[ib] = make_result(f, ib, ih, il, v);
      }
  });
  Profiles out;
  out.vs_beta.best = by_b;
  for (std::size_t ib = 0; ib < nb; ++ib) out.vs_beta.x.push_back(g.beta_db(ib));
  out.vs_h.best.assign(nh, empty_best());
  out.vs_lprime.best.assign(nl, empty_best());
  for (std::size_t ib = 0; ib < nb; ++ib) {
    for (std::size_t ih = 0; ih < nh; ++ih) merge(out.vs_h.best[ih], by_h[ib][ih]);
    for (std::size_t il = 0; il < nl; ++il) merge(out.vs_lprime.best[il], by_l[ib][il]);
  }
  for (std::size_t ih = 0; ih < nh; ++ih) out.vs_h.x.push_back(g.h(ih));
  for (std::size_t il = 0; il < nl; ++il) out.vs_lprime.x.push_back(g.lprime(il));
  return out;
}

double tau_at_rate(double rate, double h, double lprime, const Scenario& scenario) {
  scenario.validate();
  const double beta_db = to_db(cpfsk::sinr_threshold(*scenario.table, h, rate, scenario.margin_db)).value;
  return compose(scenario, beta_db, rate, cpfsk::spectral_efficiency(h), kernel_for(scenario, beta_db), lprime);
}

Profile rate_profile(const SearchGrid& grid, const Scenario& scenario, const std::vector<double>& rates) {
  grid.validate();
  scenario.validate();
  Profile out;
  for (double R : rates) {
    OptResult best = empty_best();
    for (std::size_t ih = 0; ih < grid.n_h(); ++ih) {
      const double h = grid.h(ih);
      double beta_db;
      try {
        beta_db = to_db(cpfsk::sinr_threshold(*scenario.table, h, R, scenario.margin_db)).value;
      } catch (const RateUnachievable&) {
        continue;
      }
      const double eta = cpfsk::spectral_efficiency(h);
      const double k = kernel_for(scenario, beta_db);
      for (std::size_t il = 0; il < grid.n_lprime(); ++il) {
        const double v = compose(scenario, beta_db, R, eta, k, grid.lprime(il));
        if (better(v, il, ih, 0, best)) {
          best.tau_prime = v;
          best.i_lprime = il;
          best.i_h = ih;
          best.i_beta = 0;
          best.lprime = grid.lprime(il);
          best.h = h;
          best.beta_db = beta_db;
          best.rate = R;
        }
      }
    }
    if (std::isfinite(best.tau_prime)) {
      out.x.push_back(R);
      out.best.push_back(best);
    }
  }
  return out;
}

}  // namespace fhtc::opt
