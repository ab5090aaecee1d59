#include "fhtc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "fhtc/cpfsk.hpp"
#include "fhtc/error.hpp"
#include "fhtc/netmodel.hpp"
#include "fhtc/optimize.hpp"
#include "fhtc/outage.hpp"
#include "fhtc/tc.hpp"
#include "fhtc/units.hpp"

namespace fhtc::exp {

namespace fs = std::filesystem;
using Params = std::vector<std::pair<std::string, std::string>>;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty element in list '" + s + "'");
    out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Compact label for file names: 3.5 -> 3p5, -10 -> m10.
std::string tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  for (auto& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

std::vector<double> linspace_ticks(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 0; i <= n; ++i) out.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
  return out;
}

double db(double v) { return to_linear(Db{v}); }

net::ChannelParams channel(double alpha, double gamma_db, double lprime) {
  return net::ChannelParams::with_equivalent_channels(alpha, db(gamma_db), lprime);
}

outage::OutageQuery query(double beta_db, const net::ChannelParams& params) {
  outage::OutageQuery q;
  q.beta = db(beta_db);
  q.params = params;
  q.z = 1.0 / params.gamma_snr;
  return q;
}

Curve analytic(std::string name, Params params) {
  Curve c;
  c.name = std::move(name);
  c.params = std::move(params);
  return c;
}

Curve with_argmax(std::string name, Params params) {
  Curve c = analytic(std::move(name), std::move(params));
  c.columns = {"x", "value", "stderr", "lprime", "h", "beta_db", "rate"};
  return c;
}

void add_argmax_row(Curve& c, double x, const opt::OptResult& r) {
  c.rows.push_back({x, r.tau_prime, 0.0, double(r.lprime), r.h, r.beta_db, r.rate});
}

opt::BppDensity bpp_density(const Config& cfg) {
  const auto v = cfg.str("bpp_density", "disk");
  if (v == "disk") return opt::BppDensity::NetworkDisk;
  if (v == "annulus") return opt::BppDensity::Annulus;
  throw ConfigError("bpp_density must be 'disk' or 'annulus'");
}

std::shared_ptr<const cpfsk::CapacityTable> load_table(const Config& cfg, Params& common) {
  const fs::path path = cfg.str("table", "");
  auto table = std::make_shared<cpfsk::CapacityTable>(cpfsk::load_table(path));
  common.emplace_back("table_format", std::to_string(table->meta.format_version));
  common.emplace_back("table_samples", std::to_string(table->meta.samples));
  common.emplace_back("table_seed", std::to_string(table->meta.seed));
  return table;
}

int threads_of(const Config& cfg) { return static_cast<int>(cfg.count("threads", 1)); }

// ---------------------------------------------------------------- outage

void figure1(const Config& cfg, FigureOutput& out, const fs::path& dir) {
  const auto seed = cfg.count("seed", 0);
  const auto trials = cfg.count("mc_trials", 1000000);
  const net::Annulus geom{0.25, 2.0};
  const double alpha = 3.0, lprime = 200.0;
  RngStream topo(seed, 1);
  const auto real = net::sample_bpp(geom, 50, alpha, topo);
  net::write_realization(real, dir / "fig1_topology.csv");
  out.files.push_back(dir / "fig1_topology.csv");

  const auto dense = linspace_ticks(-10.0, 40.0, 1.0);
  const auto sparse = linspace_ticks(-10.0, 40.0, 5.0);
  int k = 0;
  for (double beta_db : {10.0, 0.0, -10.0}) {
    const Params p{{"beta_db", fmt(beta_db)}, {"lprime", fmt(lprime)}, {"alpha", fmt(alpha)},
                   {"r_ex", "0.25"}, {"r_net", "2"}, {"m", "50"}, {"x", "gamma_db"}};
    Curve c = analytic("beta_" + tag(beta_db) + "db", p);
    for (double g : dense) c.rows.push_back({g, outage::conditional_outage(query(beta_db, channel(alpha, g, lprime)), real), 0.0});
    out.curves.push_back(c);

    Curve mc = analytic(c.name + "_mc", p);
    mc.params.emplace_back("mc_trials", std::to_string(trials));
    std::vector<double> zs;
    for (double g : sparse) zs.push_back(1.0 / db(g));
    const auto q = query(beta_db, channel(alpha, 0.0, lprime));
    const auto est = outage::mc_fading_outage_curve(q, real, zs, trials, RngStream(seed, 100 + k++), threads_of(cfg));
    for (std::size_t i = 0; i < zs.size(); ++i) mc.rows.push_back({sparse[i], est[i].value, est[i].stderr_});
    out.curves.push_back(mc);
  }
}

void figure2(const Config& cfg, FigureOutput& out, const fs::path&) {
  const auto seed = cfg.count("seed", 0);
  const auto networks = cfg.count("mc_networks", 10000);
  const net::Annulus geom{0.25, 2.0};
  const double alpha = 3.0, beta_db = 3.7, gamma_db = 10.0;
  int k = 0;
  for (double lp : {1.0, 10.0, 50.0, 100.0, 200.0}) {
    const auto q = query(beta_db, channel(alpha, gamma_db, lp));
    const Params p{{"lprime", fmt(lp)}, {"beta_db", fmt(beta_db)}, {"gamma_db", fmt(gamma_db)}, {"alpha", fmt(alpha)},
                   {"r_ex", "0.25"}, {"r_net", "2"}, {"x", "m"}};
    Curve c = analytic("lprime_" + tag(lp), p);
    for (int m = 0; m <= 50; ++m) c.rows.push_back({double(m), outage::bpp_outage(q, geom, m), 0.0});
    out.curves.push_back(c);
    Curve mc = analytic(c.name + "_mc", p);
    mc.params.emplace_back("mc_networks", std::to_string(networks));
    const RngStream rng(seed, 200 + k++);
    for (int m = 10; m <= 50; m += 10) {
      const auto e = outage::mc_spatial_outage(q, net::Bpp{double(m)}, geom, networks, rng, threads_of(cfg));
      mc.rows.push_back({double(m), e.value, e.stderr_});
    }
    out.curves.push_back(mc);
  }
}

void figure3(const Config& cfg, FigureOutput& out, const fs::path&) {
  const auto seed = cfg.count("seed", 0);
  const auto networks = cfg.count("mc_networks", 10000);
  const net::Annulus geom{0.25, 2.0};
  const double alpha = 3.0, lprime = 200.0;
  int k = 0;
  for (double gamma_db : {0.0, 10.0, 20.0}) {
    const Params p{{"gamma_db", fmt(gamma_db)}, {"lprime", fmt(lprime)}, {"alpha", fmt(alpha)}, {"m", "50"},
                   {"r_ex", "0.25"}, {"r_net", "2"}, {"x", "beta_db"}};
    Curve c = analytic("gamma_" + tag(gamma_db) + "db", p);
    for (double b : linspace_ticks(-10.0, 20.0, 0.5))
      c.rows.push_back({b, outage::bpp_outage(query(b, channel(alpha, gamma_db, lprime)), geom, 50), 0.0});
    out.curves.push_back(c);
    Curve mc = analytic(c.name + "_mc", p);
    mc.params.emplace_back("mc_networks", std::to_string(networks));
    const RngStream rng(seed, 300 + k++);
    for (double b : linspace_ticks(-10.0, 20.0, 2.5)) {
      const auto e = outage::mc_spatial_outage(query(b, channel(alpha, gamma_db, lprime)), net::Bpp{50}, geom,
                                               networks, rng, threads_of(cfg));
      mc.rows.push_back({b, e.value, e.stderr_});
    }
    out.curves.push_back(mc);
  }
}

void figure4(const Config& cfg, FigureOutput& out, const fs::path&) {
  const auto seed = cfg.count("seed", 0);
  const auto networks = cfg.count("mc_networks", 10000);
  const double alpha = 3.0, beta_db = 3.7, gamma_db = 10.0;
  const auto q = query(beta_db, channel(alpha, gamma_db, 1.0));
  const auto lambdas = logspace(1e-3, 1.0, 31);
  const std::vector<double> mc_lambdas{0.001, 0.003, 0.01, 0.03, 0.1, 0.3};
  int k = 0;
  for (double rn : {2.0, 10.0}) {
    const net::Annulus geom{0.0, rn};
    const Params p{{"r_net", fmt(rn)}, {"r_ex", "0"}, {"lprime", "1"}, {"beta_db", fmt(beta_db)},
                   {"gamma_db", fmt(gamma_db)}, {"alpha", fmt(alpha)}, {"x", "lambda"}};
    Curve c = analytic("rnet_" + tag(rn), p);
    for (double l : lambdas) c.rows.push_back({l, outage::ppp_outage(q, geom, l), 0.0});
    out.curves.push_back(c);
    Curve mc = analytic(c.name + "_mc", p);
    mc.params.emplace_back("mc_networks", std::to_string(networks));
    const RngStream rng(seed, 400 + k++);
    for (double l : mc_lambdas) {
      const auto e = outage::mc_spatial_outage(q, net::Ppp{l}, geom, networks, rng, threads_of(cfg));
      mc.rows.push_back({l, e.value, e.stderr_});
    }
    out.curves.push_back(mc);
  }
  Curve inf = analytic("infinite", {{"r_net", "inf"}, {"r_ex", "0"}, {"lprime", "1"}, {"beta_db", fmt(beta_db)},
                                    {"gamma_db", fmt(gamma_db)}, {"alpha", fmt(alpha)}, {"x", "lambda"}});
  for (double l : lambdas) inf.rows.push_back({l, outage::infinite_ppp_outage(q, l), 0.0});
  out.curves.push_back(inf);
}

void figure5(const Config& cfg, FigureOutput& out, const fs::path&) {
  const auto seed = cfg.count("seed", 0);
  const auto networks = cfg.count("mc_networks", 10000);
  const net::Annulus geom{0.25, 2.0};
  const double beta_db = 3.7, gamma_db = 10.0;
  const auto lambdas = logspace(1e-2, 10.0, 31);
  const std::vector<double> mc_lambdas{0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  int k = 0;
  for (double lp : {1.0, 10.0, 100.0}) {
    for (double alpha : {3.0, 3.5, 4.0}) {
      const auto q = query(beta_db, channel(alpha, gamma_db, lp));
      const Params p{{"lprime", fmt(lp)}, {"alpha", fmt(alpha)}, {"r_ex", "0.25"}, {"r_net", "2"},
                     {"beta_db", fmt(beta_db)}, {"gamma_db", fmt(gamma_db)}, {"x", "lambda"}};
      Curve c = analytic("lprime_" + tag(lp) + "_alpha_" + tag(alpha), p);
      for (double l : lambdas) c.rows.push_back({l, outage::ppp_outage(q, geom, l), 0.0});
      out.curves.push_back(c);
      Curve mc = analytic(c.name + "_mc", p);
      mc.params.emplace_back("mc_networks", std::to_string(networks));
      const RngStream rng(seed, 500 + k++);
      for (double l : mc_lambdas) {
        const auto e = outage::mc_spatial_outage(q, net::Ppp{l}, geom, networks, rng, threads_of(cfg));
        mc.rows.push_back({l, e.value, e.stderr_});
      }
      out.curves.push_back(mc);
    }
  }
}

// ---------------------------------------------------------------- capacity

// tau_c with infeasible constraints (below the noise floor) reported as 0.
double tc_or_zero(const std::function<double()>& f) {
  try {
    return f();
  } catch (const InfeasibleConstraint&) {
    return 0.0;
  }
}

void figure6(const Config&, FigureOutput& out, const fs::path&) {
  const double alpha = 3.0, beta_db = -10.0;
  const auto zetas = linspace_ticks(0.01, 0.99, 0.01);
  for (double gamma_db : {10.0, 0.0, -10.0}) {
    Curve c = analytic("gamma_" + tag(gamma_db) + "db",
                       {{"model", "bpp"}, {"gamma_db", fmt(gamma_db)}, {"beta_db", fmt(beta_db)}, {"lprime", "1"},
                        {"alpha", fmt(alpha)}, {"r_ex", "0"}, {"r_net", "2"}, {"x", "zeta"}, {"infeasible", "0"}});
    for (double z : zetas) {
      tc::TcQuery q{z, channel(alpha, gamma_db, 1.0), net::Annulus{0.0, 2.0}, db(beta_db)};
      c.rows.push_back({z, tc_or_zero([&] { return tc::tc_bpp(q); }), 0.0});
    }
    out.curves.push_back(c);
  }
}

void figure7(const Config&, FigureOutput& out, const fs::path&) {
  const double alpha = 3.0, beta_db = -10.0, gamma_db = 10.0;
  const auto zetas = linspace_ticks(0.01, 0.99, 0.01);
  const Params base{{"model", "ppp"}, {"gamma_db", fmt(gamma_db)}, {"beta_db", fmt(beta_db)}, {"lprime", "1"},
                    {"alpha", fmt(alpha)}, {"r_ex", "0"}, {"x", "zeta"}, {"infeasible", "0"}};
  for (double rn : {2.0, 10.0}) {
    Params p = base;
    p.emplace_back("r_net", fmt(rn));
    Curve c = analytic("rnet_" + tag(rn), p);
    for (double z : zetas) {
      tc::TcQuery q{z, channel(alpha, gamma_db, 1.0), net::Annulus{0.0, rn}, db(beta_db)};
      c.rows.push_back({z, tc_or_zero([&] { return tc::tc_ppp(q); }), 0.0});
    }
    out.curves.push_back(c);
  }
  Params p = base;
  p.emplace_back("r_net", "inf");
  Curve c = analytic("infinite", p);
  for (double z : zetas)
    c.rows.push_back({z, tc_or_zero([&] { return tc::tc_infinite(z, db(beta_db), db(gamma_db), alpha); }), 0.0});
  out.curves.push_back(c);
}

// ---------------------------------------------------------------- optimizer

opt::Scenario scenario(const Config& cfg, std::shared_ptr<const cpfsk::CapacityTable> table,
                       net::PointProcess process, double alpha, double gamma_db) {
  opt::Scenario s;
  s.process = process;
  s.geom = {0.25, 2.0};
  s.alpha = alpha;
  s.gamma_snr = db(gamma_db);
  s.table = std::move(table);
  s.bpp_density = bpp_density(cfg);
  return s;
}

// Optimal, code-gap and fixed-parameter series along a sweep variable.
void optimum_family(const Config& cfg, FigureOutput& out, const std::vector<double>& xs, const std::string& xname,
                    const std::function<opt::Scenario(double)>& make) {
  const double gap = cfg.num("gap_db", 1.0);
  const Params p{{"x", xname}, {"r_ex", "0.25"}, {"r_net", "2"}};
  Curve best = with_argmax("optimal", p);
  Curve gapped = with_argmax("gap_" + tag(gap) + "db", p);
  Curve fixed = with_argmax("suboptimal", p);
  gapped.params.emplace_back("gap_db", fmt(gap));
  fixed.params.emplace_back("fixed", "lprime=200 rate=0.5 h=1");
  for (double x : xs) {
    opt::Scenario s = make(x);
    const auto r = opt::exhaustive_search(opt::SearchGrid{}, s, threads_of(cfg));
    add_argmax_row(best, x, r);

    opt::Scenario sg = s;
    sg.margin_db = gap;
    opt::OptResult rg = r;
    rg.tau_prime = opt::tau_at_rate(r.rate, r.h, r.lprime, sg);
    rg.beta_db = to_db(cpfsk::sinr_threshold(*s.table, r.h, r.rate, gap)).value;
    add_argmax_row(gapped, x, rg);

    opt::OptResult rf;
    rf.lprime = 200;
    rf.h = 1.0;
    rf.rate = 0.5;
    rf.beta_db = to_db(cpfsk::sinr_threshold(*s.table, 1.0, 0.5)).value;
    rf.tau_prime = opt::tau_at_rate(0.5, 1.0, 200, s);
    add_argmax_row(fixed, x, rf);
  }
  out.curves.push_back(best);
  out.curves.push_back(gapped);
  out.curves.push_back(fixed);
}

enum class Axis { Lprime, Rate, H };

void profile_family(const Config& cfg, FigureOutput& out, Axis axis,
                    const std::vector<std::pair<std::string, opt::Scenario>>& members) {
  const opt::SearchGrid grid;
  for (const auto& [name, s] : members) {
    Curve c = with_argmax(name, {{"x", axis == Axis::Lprime ? "lprime" : axis == Axis::Rate ? "rate" : "h"},
                                 {"r_ex", "0.25"}, {"r_net", "2"}, {"alpha", fmt(s.alpha)},
                                 {"gamma_db", fmt(to_db(s.gamma_snr).value)}});
    if (axis == Axis::Rate) {
      const auto rates = linspace_ticks(0.01, 0.99, 0.01);
      const auto prof = opt::rate_profile(grid, s, rates);
      for (std::size_t i = 0; i < prof.x.size(); ++i) add_argmax_row(c, prof.x[i], prof.best[i]);
    } else {
      const auto prof = opt::exhaustive_profiles(opt::GridObjective(grid, s, threads_of(cfg)), threads_of(cfg));
      const auto& pr = axis == Axis::Lprime ? prof.vs_lprime : prof.vs_h;
      for (std::size_t i = 0; i < pr.x.size(); ++i) add_argmax_row(c, pr.x[i], pr.best[i]);
    }
    out.curves.push_back(c);
  }
}

void optimizer_figure(int id, const Config& cfg, FigureOutput& out, Params& common) {
  const auto table = load_table(cfg, common);
  const bool bpp = id <= 11;
  const net::PointProcess bpp50 = net::Bpp{50};
  if (id == 8) {
    optimum_family(cfg, out, linspace_ticks(0.0, 20.0, 1.0), "gamma_db",
                   [&](double g) { return scenario(cfg, table, bpp50, 3.0, g); });
    return;
  }
  if (id == 12) {
    optimum_family(cfg, out, {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}, "lambda",
                   [&](double l) { return scenario(cfg, table, net::Ppp{l}, 3.0, 10.0); });
    return;
  }
  std::vector<std::pair<std::string, opt::Scenario>> members;
  if (bpp) {
    for (double a : {3.0, 3.5, 4.0}) members.emplace_back("alpha_" + tag(a), scenario(cfg, table, bpp50, a, 10.0));
  } else {
    for (double l : {5.0, 2.0, 0.5, 0.1})
      members.emplace_back("lambda_" + tag(l), scenario(cfg, table, net::Ppp{l}, 3.0, 10.0));
  }
  const int slot = bpp ? id - 9 : id - 13;
  profile_family(cfg, out, slot == 0 ? Axis::Lprime : slot == 1 ? Axis::Rate : Axis::H, members);
}

}  // namespace

// ---------------------------------------------------------------- Config

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in, path.string());
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::num(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::uint64_t Config::count(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& t = it->second;
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("config key '" + key + "': '" + t + "' is not a nonnegative integer");
  try {
    return std::stoull(t);
  } catch (const std::out_of_range&) {
    throw ConfigError("config key '" + key + "': value out of range");
  }
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& w : split(it->second)) out.push_back(parse_double(key, w));
  return out;
}

std::vector<std::string> Config::words(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (trim(it->second).empty()) return {};
  return split(it->second);
}

void Config::check_keys(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_)
    if (!allowed.count(k)) throw ConfigError(source_ + ": unknown key '" + k + "'");
  if (has("format_version") && count("format_version", 0) != kConfigFormatVersion)
    throw ConfigError(source_ + ": unsupported format_version " + str("format_version", ""));
}

void Config::require(const std::string& key, const std::string& why) const {
  if (!has(key)) throw ConfigError(source_ + ": missing required key '" + key + "' (" + why + ")");
}

// ---------------------------------------------------------------- output

void write_curve(const Curve& curve, const fs::path& path, const Params& common) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  for (const auto& [k, v] : common) os << "# " << k << " = " << v << '\n';
  os << "# series = " << curve.name << '\n';
  for (const auto& [k, v] : curve.params) os << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < curve.columns.size(); ++i) os << (i ? "," : "") << curve.columns[i];
  os << '\n';
  for (const auto& row : curve.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << '\n';
  }
  if (!os) throw Error("write failed for " + path.string());
}

const Curve& FigureOutput::curve(const std::string& name) const {
  for (const auto& c : curves)
    if (c.name == name) return c;
  throw InvalidArgument("figure " + std::to_string(figure) + " has no series '" + name + "'");
}

const std::set<std::string>& figure_keys() {
  static const std::set<std::string> keys{"format_version", "seed",    "table",       "mc_trials",
                                          "mc_networks",    "threads", "bpp_density", "gap_db"};
  return keys;
}

FigureOutput run_figure(int figure, const Config& cfg, const fs::path& out_dir) {
  if (figure < 1 || figure > 15) throw ConfigError("figure id must be 1..15, got " + std::to_string(figure));
  cfg.check_keys(figure_keys());
  if (figure <= 5) cfg.require("seed", "figure " + std::to_string(figure) + " includes Monte Carlo series");
  if (figure >= 8) cfg.require("table", "figure " + std::to_string(figure) + " needs a capacity table");
  if (cfg.count("threads", 1) == 0) throw ConfigError("threads must be >= 1");
  fs::create_directories(out_dir);

  Params common{{"figure", std::to_string(figure)}, {"tool_version", kToolVersion}};
  for (const auto& [k, v] : cfg.entries()) common.emplace_back(k, v);

  FigureOutput out;
  out.figure = figure;
  switch (figure) {
    case 1: figure1(cfg, out, out_dir); break;
    case 2: figure2(cfg, out, out_dir); break;
    case 3: figure3(cfg, out, out_dir); break;
    case 4: figure4(cfg, out, out_dir); break;
    case 5: figure5(cfg, out, out_dir); break;
    case 6: figure6(cfg, out, out_dir); break;
    case 7: figure7(cfg, out, out_dir); break;
    default: optimizer_figure(figure, cfg, out, common); break;
  }
  for (const auto& c : out.curves) {
    const auto path = out_dir / ("fig" + std::to_string(figure) + "_" + c.name + ".csv");
    write_curve(c, path, common);
    out.files.push_back(path);
  }
  return out;
}

// ---------------------------------------------------------------- tables

const std::set<std::string>& table_keys() {
  static const std::set<std::string> keys{"format_version", "table",    "processes", "r_net",       "r_ex",
                                          "alpha",          "m",        "lambda",    "gamma_db",    "margin_db",
                                          "threads",        "bpp_density"};
  return keys;
}

std::vector<TableRow> run_tables(const Config& cfg, const fs::path& out_dir) {
  cfg.check_keys(table_keys());
  const auto processes = cfg.words("processes", {});
  for (const auto& p : processes)
    if (p != "bpp" && p != "ppp") throw ConfigError("processes: expected 'bpp' and/or 'ppp', got '" + p + "'");
  Params common{{"tool_version", kToolVersion}};
  for (const auto& [k, v] : cfg.entries()) common.emplace_back(k, v);
  std::shared_ptr<const cpfsk::CapacityTable> table;
  if (!processes.empty()) {
    cfg.require("table", "the optimizer needs a capacity table");
    table = load_table(cfg, common);
  }
  const auto r_nets = cfg.list("r_net", {1.0, 2.0, 4.0});
  const auto r_exs = cfg.list("r_ex", {0.25, 0.5});
  const auto alphas = cfg.list("alpha", {3.0, 3.5, 4.0});
  const int threads = threads_of(cfg);

  std::vector<TableRow> rows;
  for (const auto& proc : processes) {
    for (double rn : r_nets)
      for (double rex : r_exs)
        for (double a : alphas) {
          opt::Scenario s;
          s.process = proc == "bpp" ? net::PointProcess(net::Bpp{cfg.num("m", 50.0)})
                                    : net::PointProcess(net::Ppp{cfg.num("lambda", 1.0)});
          s.geom = {rex, rn};
          s.alpha = a;
          s.gamma_snr = db(cfg.num("gamma_db", 10.0));
          s.margin_db = cfg.num("margin_db", 0.0);
          s.table = table;
          s.bpp_density = bpp_density(cfg);
          const opt::GridObjective f(opt::SearchGrid{}, s, threads);
          const auto e = opt::exhaustive_search(f, threads);
          const auto g = opt::gradient_search(f);
          rows.push_back({proc, rn, rex, a, e.tau_prime, g.tau_prime, e.evaluations, g.evaluations, g.iterations,
                          e.lprime, e.h, e.beta_db, e.rate});
        }
  }

  fs::create_directories(out_dir);
  const auto path = out_dir / "tables.csv";
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  for (const auto& [k, v] : common) os << "# " << k << " = " << v << '\n';
  os << "process,r_net,r_ex,alpha,tau_exhaustive,tau_gradient,evaluations_exhaustive,evaluations_gradient,"
        "iterations,lprime,h,beta_db,rate\n";
  for (const auto& r : rows)
    os << r.process << ',' << fmt(r.r_net) << ',' << fmt(r.r_ex) << ',' << fmt(r.alpha) << ','
       << fmt(r.tau_exhaustive) << ',' << fmt(r.tau_gradient) << ',' << r.evaluations_exhaustive << ','
       << r.evaluations << ',' << r.iterations << ',' << r.lprime << ',' << fmt(r.h) << ',' << fmt(r.beta_db)
       << ',' << fmt(r.rate) << '\n';
  if (!os) throw Error("write failed for " + path.string());
  return rows;
}

}  // namespace fhtc::exp
