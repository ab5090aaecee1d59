#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fhtc/netmodel.hpp"
#include "fhtc/rng.hpp"

namespace fhtc::outage {

struct OutageQuery {
  double beta = 1.0;  // SINR threshold (linear)
  double z = 0.0;     // evaluation point, 1/Gamma
  net::ChannelParams params;

  double beta0() const { return beta * params.omega0; }
  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
};

/// 1 - exp(-x), accurate for small x.
double one_minus_exp_neg(double x);

/// Outage given the topology, averaged over Rayleigh fading and collisions,
/// with a common collision probability p taken from q.params.
double conditional_outage(const OutageQuery& q, const net::NetworkRealization& real);
/// Same with a collision probability per interferer.
double conditional_outage(const OutageQuery& q, const net::NetworkRealization& real,
                          std::span<const double> p);

/// Direct simulation of fading gains and collision indicators.
Estimate mc_fading_outage(const OutageQuery& q, const net::NetworkRealization& real,
                          std::uint64_t trials, const RngStream& rng, int threads = 1);
Estimate mc_fading_outage(const OutageQuery& q, const net::NetworkRealization& real,
                          std::span<const double> p, std::uint64_t trials, const RngStream& rng,
                          int threads = 1);

/// The fading simulation evaluated at several points z from the same draws:
/// element k equals mc_fading_outage at z = zs[k] with the same stream.
std::vector<Estimate> mc_fading_outage_curve(const OutageQuery& q, const net::NetworkRealization& real,
                                             std::span<const double> zs, std::uint64_t trials,
                                             const RngStream& rng, int threads = 1);

/// kappa [H(r_net^alpha) - H(r_ex^alpha)]: the mean collision-weighted
/// interference factor of one interferer placed uniformly on the annulus.
/// The spatial bracket kappa [Psi(r_net^alpha) - Psi(r_ex^alpha)] equals
/// 1 - p * interference_kernel(...).
double interference_kernel(const net::Annulus& geom, double alpha, double beta0);

/// Fixed-size network; m may be fractional (m = lambda * area).
double bpp_outage(const OutageQuery& q, const net::Annulus& geom, double m);
/// Same, reusing a precomputed interference_kernel.
double bpp_outage_from_kernel(double beta0, double z, double p, double kernel, double m);

/// Average of conditional_outage over n_networks sampled topologies.
/// Network k draws from rng.at_block(k << 32), so estimates at different
/// thresholds share topologies.
Estimate mc_spatial_outage(const OutageQuery& q, const net::PointProcess& process,
                           const net::Annulus& geom, std::uint64_t n_networks, const RngStream& rng,
                           int threads = 1);

double ppp_outage(const OutageQuery& q, const net::Annulus& geom, double lambda);
double ppp_outage_from_kernel(double beta0, double z, double p, double kernel, double area,
                              double lambda);

/// Unbounded network with r_ex = 0 and constantly transmitting interferers.
double infinite_ppp_outage(const OutageQuery& q, double lambda, double r_ex = 0.0);

/// Gamma(2/alpha) Gamma(1 - 2/alpha) = pi / sin(2 pi / alpha).
double infinite_kernel_constant(double alpha);

}  // namespace fhtc::outage
