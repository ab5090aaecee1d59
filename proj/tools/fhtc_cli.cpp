// Command-line front end: analytical operations, capacity-table management,
// and the figure/table experiment runner.
//
// Exit status: 0 ok, 1 computation error, 2 usage or configuration error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>

#include "fhtc/cpfsk.hpp"
#include "fhtc/error.hpp"
#include "fhtc/experiments.hpp"
#include "fhtc/netmodel.hpp"
#include "fhtc/optimize.hpp"
#include "fhtc/outage.hpp"
#include "fhtc/tc.hpp"
#include "fhtc/units.hpp"

namespace {

using namespace fhtc;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LinkFlags {
  double beta_db = 3.7;
  double gamma_db = 10.0;
  double alpha = 3.0;
  double lprime = 1.0;
  double r_ex = 0.25;
  double r_net = 2.0;

  void add(CLI::App* app) {
    app->add_option("--beta-db", beta_db, "SINR threshold beta [dB]")->capture_default_str();
    app->add_option("--gamma-db", gamma_db, "SNR Gamma at unit distance [dB]")->capture_default_str();
    app->add_option("--alpha", alpha, "path-loss exponent")->capture_default_str();
    app->add_option("--lprime", lprime, "equivalent channels L' = L/d (collision probability 1/L')")
        ->capture_default_str();
    app->add_option("--r-ex", r_ex, "exclusion radius")->capture_default_str();
    app->add_option("--r-net", r_net, "network radius")->capture_default_str();
  }
  net::ChannelParams channel() const {
    return net::ChannelParams::with_equivalent_channels(alpha, to_linear(Db{gamma_db}), lprime);
  }
  outage::OutageQuery query() const {
    outage::OutageQuery q;
    q.beta = to_linear(Db{beta_db});
    q.params = channel();
    q.z = 1.0 / q.params.gamma_snr;
    return q;
  }
  net::Annulus geom() const { return {r_ex, r_net}; }
};

void print_result_csv(const opt::OptResult& r, const std::string& method) {
  std::cout << "method,lprime,h,beta_db,rate,tau_prime,evaluations,iterations\n"
            << method << ',' << r.lprime << ',' << fmt(r.h) << ',' << fmt(r.beta_db) << ',' << fmt(r.rate) << ','
            << fmt(r.tau_prime) << ',' << r.evaluations << ',' << r.iterations << '\n';
}

void print_result_report(const opt::OptResult& r, const std::string& method) {
  std::printf("method       %s\n", method.c_str());
  std::printf("L'           %d\n", r.lprime);
  std::printf("h            %.2f\n", r.h);
  std::printf("beta         %.1f dB\n", r.beta_db);
  std::printf("R            %.5f bits/symbol\n", r.rate);
  std::printf("tau'         %.6g bps/Hz per unit area\n", r.tau_prime);
  std::printf("evaluations  %llu\n", static_cast<unsigned long long>(r.evaluations));
  std::printf("iterations   %llu\n", static_cast<unsigned long long>(r.iterations));
}

int run(int argc, char** argv) {
  CLI::App app{"Frequency-hopping ad hoc network outage and transmission-capacity toolkit"};
  app.set_version_flag("--version", exp::kToolVersion);
  app.require_subcommand(1);

  // outage --------------------------------------------------------------
  auto* outage_cmd = app.add_subcommand("outage", "outage probability (closed form, optionally with Monte Carlo)");
  LinkFlags of;
  std::string omodel = "bpp", realization;
  double om = 50, olambda = 1.0;
  std::uint64_t oseed = 0, otrials = 0, onetworks = 0;
  of.add(outage_cmd);
  outage_cmd->add_option("--model", omodel, "conditional | bpp | ppp | infinite")
      ->check(CLI::IsMember({"conditional", "bpp", "ppp", "infinite"}))
      ->capture_default_str();
  outage_cmd->add_option("--m", om, "number of interferers (bpp; may be fractional)")->capture_default_str();
  outage_cmd->add_option("--lambda", olambda, "interferer density per unit area (ppp, infinite)")
      ->capture_default_str();
  outage_cmd->add_option("--realization", realization, "topology CSV (index,omega) for --model conditional");
  outage_cmd->add_option("--seed", oseed, "seed for Monte Carlo estimates")->capture_default_str();
  outage_cmd->add_option("--mc-trials", otrials, "fading trials (conditional); 0 = closed form only");
  outage_cmd->add_option("--mc-networks", onetworks, "sampled networks (bpp, ppp); 0 = closed form only");

  // tc ------------------------------------------------------------------
  auto* tc_cmd = app.add_subcommand("tc", "outage-constrained transmission capacity");
  LinkFlags tf;
  std::string tkind = "bpp";
  double zeta = 0.1;
  bool density_only = false;
  tf.add(tc_cmd);
  tc_cmd->add_option("--kind", tkind, "bpp | ppp | infinite")
      ->check(CLI::IsMember({"bpp", "ppp", "infinite"}))
      ->capture_default_str();
  tc_cmd->add_option("--zeta", zeta, "outage constraint zeta in (0,1)")->capture_default_str();
  tc_cmd->add_flag("--density", density_only, "print the density at the constraint instead of tau_c");

  // optimize ------------------------------------------------------------
  auto* opt_cmd = app.add_subcommand("optimize", "maximize tau' over (L', R, h)");
  std::string method = "gradient", pmodel = "bpp", table_path = "data/capacity_table.csv", density = "disk",
              oformat = "csv";
  double pm = 50, plambda = 1.0, palpha = 3.0, pgamma_db = 10.0, margin_db = 0.0, pr_ex = 0.25, pr_net = 2.0;
  int threads = 1;
  opt::SearchGrid grid;
  opt_cmd->add_option("--method", method, "exhaustive | gradient")
      ->check(CLI::IsMember({"exhaustive", "gradient"}))
      ->capture_default_str();
  opt_cmd->add_option("--model", pmodel, "bpp | ppp")->check(CLI::IsMember({"bpp", "ppp"}))->capture_default_str();
  opt_cmd->add_option("--m", pm, "number of interferers (bpp)")->capture_default_str();
  opt_cmd->add_option("--lambda", plambda, "interferer density (ppp)")->capture_default_str();
  opt_cmd->add_option("--alpha", palpha, "path-loss exponent")->capture_default_str();
  opt_cmd->add_option("--gamma-db", pgamma_db, "SNR Gamma [dB]")->capture_default_str();
  opt_cmd->add_option("--margin-db", margin_db, "code gap from capacity [dB]")->capture_default_str();
  opt_cmd->add_option("--r-ex", pr_ex, "exclusion radius")->capture_default_str();
  opt_cmd->add_option("--r-net", pr_net, "network radius")->capture_default_str();
  opt_cmd->add_option("--table", table_path, "capacity table CSV")->capture_default_str();
  opt_cmd->add_option("--bpp-density", density, "disk (M/(pi r_net^2)) | annulus (M/A)")
      ->check(CLI::IsMember({"disk", "annulus"}))
      ->capture_default_str();
  opt_cmd->add_option("--threads", threads, "worker threads for the exhaustive search")->capture_default_str();
  opt_cmd->add_option("--format", oformat, "csv | report")->check(CLI::IsMember({"csv", "report"}))
      ->capture_default_str();
  opt_cmd->add_option("--beta-min-db", grid.beta_min_db, "beta grid start [dB]")->capture_default_str();
  opt_cmd->add_option("--beta-max-db", grid.beta_max_db, "beta grid end [dB]")->capture_default_str();
  opt_cmd->add_option("--beta-step-db", grid.beta_step_db, "beta grid step [dB]")->capture_default_str();
  opt_cmd->add_option("--h-min", grid.h_min, "h grid start")->capture_default_str();
  opt_cmd->add_option("--h-max", grid.h_max, "h grid end")->capture_default_str();
  opt_cmd->add_option("--h-step", grid.h_step, "h grid step")->capture_default_str();
  opt_cmd->add_option("--lprime-min", grid.lprime_min, "smallest L'")->capture_default_str();
  opt_cmd->add_option("--lprime-max", grid.lprime_max, "largest L'")->capture_default_str();

  // capacity-table --------------------------------------------------------
  auto* ct_cmd = app.add_subcommand("capacity-table", "build or inspect a CPFSK capacity table");
  ct_cmd->require_subcommand(1);
  auto* build_cmd = ct_cmd->add_subcommand("build", "estimate C(h, gamma) on a grid and save it");
  std::string build_out;
  std::uint64_t samples = 200000, bseed = 20100601;
  int bthreads = 0;
  double h_min = 0.0, h_max = 1.0, h_step = 0.01, g_min = -4.0, g_max = 14.0, g_step = 0.1;
  build_cmd->add_option("--out", build_out, "output CSV (sidecar JSON written next to it)")->required();
  build_cmd->add_option("--samples", samples, "Monte Carlo samples per cell")->capture_default_str();
  build_cmd->add_option("--seed", bseed, "random seed")->capture_default_str();
  build_cmd->add_option("--threads", bthreads, "worker threads (0 = all cores)")->capture_default_str();
  build_cmd->add_option("--h-min", h_min, "h grid start")->capture_default_str();
  build_cmd->add_option("--h-max", h_max, "h grid end")->capture_default_str();
  build_cmd->add_option("--h-step", h_step, "h grid step")->capture_default_str();
  build_cmd->add_option("--gamma-min-db", g_min, "SINR grid start [dB]")->capture_default_str();
  build_cmd->add_option("--gamma-max-db", g_max, "SINR grid end [dB]")->capture_default_str();
  build_cmd->add_option("--gamma-step-db", g_step, "SINR grid step [dB]")->capture_default_str();
  auto* inspect_cmd = ct_cmd->add_subcommand("inspect", "summarize a saved table");
  std::string inspect_path;
  inspect_cmd->add_option("--table", inspect_path, "capacity table CSV")->required();

  // experiments ----------------------------------------------------------
  auto* fig_cmd = app.add_subcommand("figure", "reproduce one figure as CSV files");
  int fig_id = 0;
  std::string fig_config, fig_out = "out";
  fig_cmd->add_option("id", fig_id, "figure number 1..15")->required();
  fig_cmd->add_option("--config", fig_config, "key = value config file");
  fig_cmd->add_option("--out", fig_out, "output directory")->capture_default_str();

  auto* tables_cmd = app.add_subcommand("tables", "run both optimizers over the table rows");
  std::string tables_config, tables_out = "out";
  tables_cmd->add_option("--config", tables_config, "key = value config file");
  tables_cmd->add_option("--out", tables_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*outage_cmd) {
    const auto q = of.query();
    const RngStream rng(oseed, 0);
    if (omodel == "conditional") {
      if (realization.empty()) throw ConfigError("--model conditional needs --realization");
      const auto real = net::read_realization(realization);
      std::cout << fmt(outage::conditional_outage(q, real)) << '\n';
      if (otrials) {
        const auto e = outage::mc_fading_outage(q, real, otrials, rng);
        std::cout << "mc," << fmt(e.value) << ',' << fmt(e.stderr_) << '\n';
      }
    } else if (omodel == "bpp") {
      std::cout << fmt(outage::bpp_outage(q, of.geom(), om)) << '\n';
      if (onetworks) {
        const auto e = outage::mc_spatial_outage(q, net::Bpp{om}, of.geom(), onetworks, rng);
        std::cout << "mc," << fmt(e.value) << ',' << fmt(e.stderr_) << '\n';
      }
    } else if (omodel == "ppp") {
      std::cout << fmt(outage::ppp_outage(q, of.geom(), olambda)) << '\n';
      if (onetworks) {
        const auto e = outage::mc_spatial_outage(q, net::Ppp{olambda}, of.geom(), onetworks, rng);
        std::cout << "mc," << fmt(e.value) << ',' << fmt(e.stderr_) << '\n';
      }
    } else {
      std::cout << fmt(outage::infinite_ppp_outage(q, olambda, of.r_ex)) << '\n';
    }
    return 0;
  }

  if (*tc_cmd) {
    tc::TcQuery q{zeta, tf.channel(), tf.geom(), to_linear(Db{tf.beta_db})};
    double v;
    if (tkind == "bpp") {
      v = density_only ? tc::density_at_outage_bpp(q) : tc::tc_bpp(q);
    } else if (tkind == "ppp") {
      v = density_only ? tc::density_at_outage_ppp(q) : tc::tc_ppp(q);
    } else {
      if (density_only) throw ConfigError("--density is not available for --kind infinite");
      v = tc::tc_infinite(zeta, q.beta0(), q.params.gamma_snr, tf.alpha);
    }
    std::cout << fmt(v) << '\n';
    return 0;
  }

  if (*opt_cmd) {
    opt::Scenario s;
    s.process = pmodel == "bpp" ? net::PointProcess(net::Bpp{pm}) : net::PointProcess(net::Ppp{plambda});
    s.geom = {pr_ex, pr_net};
    s.alpha = palpha;
    s.gamma_snr = to_linear(Db{pgamma_db});
    s.margin_db = margin_db;
    s.bpp_density = density == "disk" ? opt::BppDensity::NetworkDisk : opt::BppDensity::Annulus;
    s.table = std::make_shared<cpfsk::CapacityTable>(cpfsk::load_table(table_path));
    const auto r = method == "exhaustive" ? opt::exhaustive_search(grid, s, threads) : opt::gradient_search(grid, s);
    if (oformat == "csv")
      print_result_csv(r, method);
    else
      print_result_report(r, method);
    return 0;
  }

  if (*build_cmd) {
    std::vector<double> hs, gs;
    for (long i = 0, n = std::lround((h_max - h_min) / h_step); i <= n; ++i)
      hs.push_back(std::round((h_min + i * h_step) * 1e9) / 1e9);
    for (long i = 0, n = std::lround((g_max - g_min) / g_step); i <= n; ++i)
      gs.push_back(std::round((g_min + i * g_step) * 1e9) / 1e9);
    const auto table = cpfsk::build_table(hs, gs, samples, bseed, bthreads);
    cpfsk::save_table(table, build_out);
    std::cout << "wrote " << build_out << " (" << hs.size() << " x " << gs.size() << ", "
              << table.meta.isotonic_adjustments << " isotonic adjustments)\n";
    return 0;
  }

  if (*inspect_cmd) {
    const auto t = cpfsk::load_table(inspect_path);
    std::cout << "format_version   " << t.meta.format_version << '\n'
              << "estimator        " << t.meta.estimator << '\n'
              << "samples          " << t.meta.samples << '\n'
              << "seed             " << t.meta.seed << '\n'
              << "built            " << t.meta.build_timestamp << '\n'
              << "isotonic fixes   " << t.meta.isotonic_adjustments << '\n'
              << "h grid           " << t.h.size() << " points [" << t.h.front() << ", " << t.h.back() << "]\n"
              << "gamma grid (dB)  " << t.gamma_db.size() << " points [" << t.gamma_db.front() << ", "
              << t.gamma_db.back() << "]\n";
    try {
      std::printf("beta(h=1, R=1/2) %.4f dB\n", to_db(cpfsk::sinr_threshold(t, 1.0, 0.5)).value);
    } catch (const Error& e) {
      std::cout << "beta(h=1, R=1/2) n/a (" << e.what() << ")\n";
    }
    return 0;
  }

  if (*fig_cmd) {
    const auto cfg = fig_config.empty() ? exp::Config{} : exp::Config::load(fig_config);
    const auto out = exp::run_figure(fig_id, cfg, fig_out);
    for (const auto& f : out.files) std::cout << f.string() << '\n';
    return 0;
  }

  if (*tables_cmd) {
    const auto cfg = tables_config.empty() ? exp::Config{} : exp::Config::load(tables_config);
    const auto rows = exp::run_tables(cfg, tables_out);
    std::cout << (std::filesystem::path(tables_out) / "tables.csv").string() << " (" << rows.size() << " rows)\n";
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fhtc::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
