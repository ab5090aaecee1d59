#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fhtc/cpfsk.hpp"
#include "fhtc/error.hpp"
#include "fhtc/experiments.hpp"
#include "fhtc/netmodel.hpp"
#include "fhtc/optimize.hpp"
#include "fhtc/outage.hpp"
#include "fhtc/specfun.hpp"
#include "fhtc/tc.hpp"
#include "fhtc/units.hpp"

namespace py = pybind11;
using namespace fhtc;

namespace {

net::ChannelParams channel(double alpha, double gamma_db, double lprime) {
  return net::ChannelParams::with_equivalent_channels(alpha, to_linear(Db{gamma_db}), lprime);
}

outage::OutageQuery query(double beta_db, double gamma_db, double alpha, double lprime) {
  outage::OutageQuery q;
  q.beta = to_linear(Db{beta_db});
  q.params = channel(alpha, gamma_db, lprime);
  q.z = 1.0 / q.params.gamma_snr;
  return q;
}

}  // namespace

PYBIND11_MODULE(_fhtc, m) {
  m.doc() = "Outage, transmission capacity and parameter optimization for frequency-hopping ad hoc networks";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("gamma_fn", &specfun::gamma_fn, py::arg("x"));
  m.def("gauss_2f1", &specfun::gauss_2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));
  m.def("psi_fn", &specfun::psi_fn, py::arg("x"), py::arg("p"), py::arg("alpha"), py::arg("beta0"));

  // Outage. Thresholds and SNR in dB, as on the command line.
  m.def(
      "conditional_outage",
      [](const std::vector<double>& omegas, double beta_db, double gamma_db, double alpha, double lprime) {
        return outage::conditional_outage(query(beta_db, gamma_db, alpha, lprime), net::NetworkRealization{omegas});
      },
      py::arg("omegas"), py::arg("beta_db"), py::arg("gamma_db"), py::arg("alpha") = 3.0, py::arg("lprime") = 1.0);
  m.def(
      "bpp_outage",
      [](double m_, double beta_db, double gamma_db, double alpha, double lprime, double r_ex, double r_net) {
        return outage::bpp_outage(query(beta_db, gamma_db, alpha, lprime), net::Annulus{r_ex, r_net}, m_);
      },
      py::arg("m"), py::arg("beta_db"), py::arg("gamma_db"), py::arg("alpha") = 3.0, py::arg("lprime") = 1.0,
      py::arg("r_ex") = 0.25, py::arg("r_net") = 2.0);
  m.def(
      "ppp_outage",
      [](double lambda, double beta_db, double gamma_db, double alpha, double lprime, double r_ex, double r_net) {
        return outage::ppp_outage(query(beta_db, gamma_db, alpha, lprime), net::Annulus{r_ex, r_net}, lambda);
      },
      py::arg("lam"), py::arg("beta_db"), py::arg("gamma_db"), py::arg("alpha") = 3.0, py::arg("lprime") = 1.0,
      py::arg("r_ex") = 0.25, py::arg("r_net") = 2.0);
  m.def(
      "infinite_ppp_outage",
      [](double lambda, double beta_db, double gamma_db, double alpha) {
        return outage::infinite_ppp_outage(query(beta_db, gamma_db, alpha, 1.0), lambda);
      },
      py::arg("lam"), py::arg("beta_db"), py::arg("gamma_db"), py::arg("alpha") = 3.0);
  m.def(
      "mc_spatial_outage",
      [](const std::string& model, double size, double beta_db, double gamma_db, double alpha, double lprime,
         double r_ex, double r_net, std::uint64_t networks, std::uint64_t seed) {
        if (model != "bpp" && model != "ppp") throw InvalidArgument("model must be 'bpp' or 'ppp'");
        const net::PointProcess proc =
            model == "bpp" ? net::PointProcess(net::Bpp{size}) : net::PointProcess(net::Ppp{size});
        const auto e = outage::mc_spatial_outage(query(beta_db, gamma_db, alpha, lprime), proc,
                                                 net::Annulus{r_ex, r_net}, networks, RngStream(seed, 0));
        return py::make_tuple(e.value, e.stderr_);
      },
      py::arg("model"), py::arg("size"), py::arg("beta_db"), py::arg("gamma_db"), py::arg("alpha") = 3.0,
      py::arg("lprime") = 1.0, py::arg("r_ex") = 0.25, py::arg("r_net") = 2.0, py::arg("networks") = 10000,
      py::arg("seed") = 0);

  // Transmission capacity.
  m.def(
      "tc",
      [](const std::string& kind, double zeta, double beta_db, double gamma_db, double alpha, double lprime,
         double r_ex, double r_net) {
        tc::TcQuery q{zeta, channel(alpha, gamma_db, lprime), net::Annulus{r_ex, r_net}, to_linear(Db{beta_db})};
        if (kind == "bpp") return tc::tc_bpp(q);
        if (kind == "ppp") return tc::tc_ppp(q);
        if (kind == "infinite") return tc::tc_infinite(zeta, q.beta0(), q.params.gamma_snr, alpha);
        throw InvalidArgument("kind must be 'bpp', 'ppp' or 'infinite'");
      },
      py::arg("kind"), py::arg("zeta"), py::arg("beta_db"), py::arg("gamma_db"), py::arg("alpha") = 3.0,
      py::arg("lprime") = 1.0, py::arg("r_ex") = 0.0, py::arg("r_net") = 2.0);

  // Modulation.
  py::class_<cpfsk::CapacityTable, std::shared_ptr<cpfsk::CapacityTable>>(m, "CapacityTable")
      .def_readonly("h", &cpfsk::CapacityTable::h)
      .def_readonly("gamma_db", &cpfsk::CapacityTable::gamma_db)
      .def_property_readonly("samples", [](const cpfsk::CapacityTable& t) { return t.meta.samples; })
      .def_property_readonly("seed", [](const cpfsk::CapacityTable& t) { return t.meta.seed; });
  m.def(
      "load_table",
      [](const std::filesystem::path& p) { return std::make_shared<cpfsk::CapacityTable>(cpfsk::load_table(p)); },
      py::arg("path"));
  m.def(
      "capacity", [](const cpfsk::CapacityTable& t, double h, double gamma_db) { return cpfsk::capacity(t, h, Db{gamma_db}); },
      py::arg("table"), py::arg("h"), py::arg("gamma_db"));
  m.def(
      "sinr_threshold_db",
      [](const cpfsk::CapacityTable& t, double h, double rate, double margin_db) {
        return to_db(cpfsk::sinr_threshold(t, h, rate, margin_db)).value;
      },
      py::arg("table"), py::arg("h"), py::arg("rate"), py::arg("margin_db") = 0.0);
  m.def("spectral_efficiency", &cpfsk::spectral_efficiency, py::arg("h"));
  m.def(
      "estimate_capacity",
      [](double h, double gamma_db, std::uint64_t samples, std::uint64_t seed) {
        return cpfsk::estimate_capacity(h, to_linear(Db{gamma_db}), samples, RngStream(seed, 0));
      },
      py::arg("h"), py::arg("gamma_db"), py::arg("samples") = 100000, py::arg("seed") = 0);

  // Optimization.
  m.def(
      "optimize",
      [](std::shared_ptr<cpfsk::CapacityTable> table, const std::string& model, double size, double r_ex,
         double r_net, double alpha, double gamma_db, double margin_db, const std::string& method) {
        opt::Scenario s;
        if (model == "bpp")
          s.process = net::Bpp{size};
        else if (model == "ppp")
          s.process = net::Ppp{size};
        else
          throw InvalidArgument("model must be 'bpp' or 'ppp'");
        s.geom = {r_ex, r_net};
        s.alpha = alpha;
        s.gamma_snr = to_linear(Db{gamma_db});
        s.margin_db = margin_db;
        s.table = std::move(table);
        opt::OptResult r;
        if (method == "exhaustive")
          r = opt::exhaustive_search(opt::SearchGrid{}, s);
        else if (method == "gradient")
          r = opt::gradient_search(opt::SearchGrid{}, s);
        else
          throw InvalidArgument("method must be 'exhaustive' or 'gradient'");
        py::dict d;
        d["lprime"] = r.lprime;
        d["h"] = r.h;
        d["beta_db"] = r.beta_db;
        d["rate"] = r.rate;
        d["tau_prime"] = r.tau_prime;
        d["evaluations"] = r.evaluations;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("table"), py::arg("model"), py::arg("size"), py::arg("r_ex") = 0.25, py::arg("r_net") = 2.0,
      py::arg("alpha") = 3.0, py::arg("gamma_db") = 10.0, py::arg("margin_db") = 0.0,
      py::arg("method") = "gradient");

  m.def(
      "run_figure",
      [](int figure, const std::map<std::string, std::string>& config, const std::filesystem::path& out_dir) {
        exp::Config cfg;
        for (const auto& [k, v] : config) cfg.set(k, v);
        const auto out = exp::run_figure(figure, cfg, out_dir);
        std::vector<std::string> files;
        for (const auto& f : out.files) files.push_back(f.string());
        return files;
      },
      py::arg("figure"), py::arg("config"), py::arg("out_dir"));
}
