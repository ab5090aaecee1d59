#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "fhtc/rng.hpp"

namespace fhtc::net {

// Interferers live in an annulus centred on the reference receiver.
struct Annulus {
  double r_ex = 0.0;   // exclusion (inner) radius
  double r_net = 1.0;  // network (outer) radius

  double area() const;
  // 1 / (r_net^2 - r_ex^2)
  double kappa() const;
  void validate() const;
};

// Link-level parameters. The collision probability is p = duty / channels and
// the equivalent channel count is L' = channels / duty.
struct ChannelParams {
  double alpha = 3.0;       // path-loss exponent, >= 2
  double gamma_snr = 10.0;  // SNR at unit distance without fading (linear)
  int channels = 1;         // hopping channels L
  double duty = 1.0;        // duty factor d in (0, 1]
  double omega0 = 1.0;      // reference link inverse power ||X0||^alpha
  double r0 = 1.0;          // reference distance of the path-loss law

  static ChannelParams with_equivalent_channels(double alpha, double gamma_snr, double lprime);

  double collision_probability() const { return duty / channels; }
  double equivalent_channels() const { return channels / duty; }
  void validate() const;
};

// Inverse normalized powers Omega_i = (P0/Pi) ||X_i||^alpha of one topology.
struct NetworkRealization {
  std::vector<double> omegas;
  std::size_t m() const { return omegas.size(); }
};

// Fixed number of interferers (real-valued where the closed forms allow it;
// samplers round to the nearest count).
struct Bpp {
  double m = 0.0;
};
// Poisson number of interferers with mean lambda * area.
struct Ppp {
  double lambda = 0.0;
};
using PointProcess = std::variant<Bpp, Ppp>;

/// Density of interferers per unit area implied by a process on `geom`.
double density(const PointProcess& process, const Annulus& geom);

/// m points i.i.d. uniform over the annulus, all at equal transmit power.
/// Radius r = r_net sqrt(x1) with x1 ~ U[(r_ex/r_net)^2, 1]; angle 2 pi x2.
/// Distances below `min_distance` are clamped to it (near-field guard; off
/// by default because the closed forms assume the pure power law).
NetworkRealization sample_bpp(const Annulus& geom, std::size_t m, double alpha, RngStream& rng,
                              double min_distance = 0.0);

/// M ~ Poisson(lambda * area), then sample_bpp.
NetworkRealization sample_ppp(const Annulus& geom, double lambda, double alpha, RngStream& rng,
                              double min_distance = 0.0);

NetworkRealization sample(const PointProcess& process, const Annulus& geom, double alpha, RngStream& rng);

/// gamma = g0/Omega0 / (1/Gamma + sum_i I_i g_i / Omega_i).
/// `gains` and `indicators` are per interferer; g0 is the reference gain.
double instantaneous_sinr(const NetworkRealization& real, const ChannelParams& params, double g0,
                          std::span<const double> gains, std::span<const int> indicators);

/// CSV with header `index,omega`, one row per interferer.
void write_realization(const NetworkRealization& real, const std::filesystem::path& path);
NetworkRealization read_realization(const std::filesystem::path& path);

}  // namespace fhtc::net
