#include "fhtc/netmodel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "fhtc/error.hpp"

namespace fhtc::net {

double Annulus::area() const { return std::numbers::pi * (r_net * r_net - r_ex * r_ex); }

double Annulus::kappa() const { return 1.0 / (r_net * r_net - r_ex * r_ex); }

void Annulus::validate() const {
  if (!(r_ex >= 0.0) || !(r_net > r_ex) || !std::isfinite(r_net))
    throw InvalidArgument("annulus: need 0 <= r_ex < r_net < inf");
}

ChannelParams ChannelParams::with_equivalent_channels(double alpha, double gamma_snr, double lprime) {
  ChannelParams p;
  p.alpha = alpha;
  p.gamma_snr = gamma_snr;
  // Fractional L' is carried by the duty factor d = L / L' <= 1, so L is the
  // largest whole channel count not above L'.
  if (!(lprime >= 1.0)) throw InvalidArgument("channel: equivalent channel count must be >= 1");
  p.channels = static_cast<int>(std::floor(lprime));
  p.duty = p.channels / lprime;
  p.validate();
  return p;
}

void ChannelParams::validate() const {
  if (!(alpha >= 2.0)) throw InvalidArgument("channel: path-loss exponent must be >= 2");
  if (!(gamma_snr > 0.0)) throw InvalidArgument("channel: SNR must be positive");
  if (channels < 1) throw InvalidArgument("channel: need at least one hopping channel");
  if (!(duty > 0.0 && duty <= 1.0)) throw InvalidArgument("channel: duty factor must lie in (0, 1]");
  if (!(omega0 > 0.0)) throw InvalidArgument("channel: omega0 must be positive");
  if (!(r0 > 0.0)) throw InvalidArgument("channel: reference distance must be positive");
}

double density(const PointProcess& process, const Annulus& geom) {
  if (const auto* b = std::get_if<Bpp>(&process)) return b->m / geom.area();
  return std::get<Ppp>(process).lambda;
}

NetworkRealization sample_bpp(const Annulus& geom, std::size_t m, double alpha, RngStream& rng,
                              double min_distance) {
  geom.validate();
  NetworkRealization real;
  real.omegas.reserve(m);
  const double lo = (geom.r_ex / geom.r_net) * (geom.r_ex / geom.r_net);
  for (std::size_t i = 0; i < m; ++i) {
    const double x1 = lo + (1.0 - lo) * rng.uniform();
    rng.uniform();  // angle: theta = 2 pi x2 does not enter Omega for a centred receiver
    const double r = std::max(geom.r_net * std::sqrt(x1), min_distance);
    real.omegas.push_back(std::pow(r, alpha));
  }
  return real;
}

NetworkRealization sample_ppp(const Annulus& geom, double lambda, double alpha, RngStream& rng,
                              double min_distance) {
  if (!(lambda >= 0.0)) throw InvalidArgument("sample_ppp: density must be nonnegative");
  geom.validate();
  const auto count = rng.poisson(lambda * geom.area());
  return sample_bpp(geom, static_cast<std::size_t>(count), alpha, rng, min_distance);
}

NetworkRealization sample(const PointProcess& process, const Annulus& geom, double alpha, RngStream& rng) {
  if (const auto* b = std::get_if<Bpp>(&process)) {
    if (!(b->m >= 0.0)) throw InvalidArgument("sample: interferer count must be nonnegative");
    return sample_bpp(geom, static_cast<std::size_t>(std::llround(b->m)), alpha, rng);
  }
  return sample_ppp(geom, std::get<Ppp>(process).lambda, alpha, rng);
}

double instantaneous_sinr(const NetworkRealization& real, const ChannelParams& params, double g0,
                          std::span<const double> gains, std::span<const int> indicators) {
  if (gains.size() != real.m() || indicators.size() != real.m())
    throw InvalidArgument("instantaneous_sinr: gains/indicators length must equal the interferer count");
  if (!(g0 >= 0.0)) throw InvalidArgument("instantaneous_sinr: negative fading gain");
  double denom = 1.0 / params.gamma_snr;
  for (std::size_t i = 0; i < real.m(); ++i) {
    if (!(gains[i] >= 0.0)) throw InvalidArgument("instantaneous_sinr: negative fading gain");
    if (indicators[i] != 0 && indicators[i] != 1) throw InvalidArgument("instantaneous_sinr: indicators must be 0 or 1");
    if (indicators[i]) denom += gains[i] / real.omegas[i];
  }
  return (g0 / params.omega0) / denom;
}

void write_realization(const NetworkRealization& real, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("write_realization: cannot open " + path.string());
  os << std::setprecision(17) << "index,omega\n";
  for (std::size_t i = 0; i < real.m(); ++i) os << i << ',' << real.omegas[i] << '\n';
  if (!os) throw Error("write_realization: write failed for " + path.string());
}

NetworkRealization read_realization(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("read_realization: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != "index,omega")
    throw FormatError("read_realization: expected header 'index,omega'");
  NetworkRealization real;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("read_realization: malformed row '" + line + "'");
    try {
      const auto index = std::stoull(line.substr(0, comma));
      const double omega = std::stod(line.substr(comma + 1));
      if (index != expected) throw FormatError("read_realization: rows must be indexed 0, 1, 2, ...");
      if (!(omega > 0.0)) throw FormatError("read_realization: omega must be positive");
      real.omegas.push_back(omega);
      ++expected;
    } catch (const std::logic_error&) {
      throw FormatError("read_realization: malformed row '" + line + "'");
    }
  }
  return real;
}

}  // namespace fhtc::net
