#pragma once

#include "fhtc/netmodel.hpp"
#include "fhtc/outage.hpp"

namespace fhtc::tc {

struct TcQuery {
  double zeta = 0.1;  // outage constraint
  net::ChannelParams params;
  net::Annulus geom;
  double beta = 1.0;  // SINR threshold (linear)

  double beta0() const { return beta * params.omega0; }
  // Outage with no interferers, 1 - exp(-beta0 / Gamma).
  double noise_floor() const;
  void validate() const;
};

/// Largest density meeting the outage constraint, fixed-size network with
/// m = lambda * area. +inf when p = 0.
double density_at_outage_bpp(const TcQuery& q);
double density_at_outage_ppp(const TcQuery& q);

/// (1 - zeta) times the density above.
double tc_bpp(const TcQuery& q);
double tc_ppp(const TcQuery& q);
double tc_infinite(double zeta, double beta0, double gamma_snr, double alpha);

// Operating point of the modulation-constrained capacity.
struct TcObjective {
  double density = 0.0;  // interferers per unit area (BPP: M / area)
  double rate = 0.5;     // code rate R, bits/symbol
  double eta = 1.0;      // spectral efficiency of the modulation, symbols/s/Hz
  double lprime = 1.0;   // equivalent channels L'
  double bandwidth_hz = 1.0;

  void validate() const;
};

/// Per-link throughput R eta B (1 - eps) / L', bits/s.
double throughput(const TcObjective& obj, double eps);
/// lambda R eta B (1 - eps) / L', bits/s per unit area.
double modconstrained_tc_unnormalized(const TcObjective& obj, double eps);
/// tau' = lambda R eta (1 - eps) / L', bits/s/Hz per unit area.
double modconstrained_tc(const TcObjective& obj, double eps);

enum class Model { Bpp, Ppp };

/// tau' with eps from the closed form for `model`; the BPP uses the real
/// count m = density * area. The collision probability is 1 / L'.
double modconstrained_tc(const TcObjective& obj, Model model, const net::Annulus& geom,
                         const outage::OutageQuery& q);

}  // namespace fhtc::tc
