#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "fhtc/cpfsk.hpp"
#include "fhtc/netmodel.hpp"
#include "fhtc/tc.hpp"

namespace fhtc::opt {

// Quantized search space. Defaults: beta in [-2, 12] dB step 0.1,
// h in [0.01, 1] step 0.01, L' in {1, ..., 200}.
struct SearchGrid {
  double beta_min_db = -2.0;
  double beta_max_db = 12.0;
  double beta_step_db = 0.1;
  double h_min = 0.01;
  double h_max = 1.0;
  double h_step = 0.01;
  int lprime_min = 1;
  int lprime_max = 200;

  std::size_t n_beta() const;
  std::size_t n_h() const;
  std::size_t n_lprime() const;
  std::uint64_t size() const { return std::uint64_t(n_beta()) * n_h() * n_lprime(); }
  double beta_db(std::size_t i) const;
  double h(std::size_t i) const;
  int lprime(std::size_t i) const { return lprime_min + static_cast<int>(i); }
  void validate() const;
};

// Area that turns a BPP count M into the density lambda multiplying tau'.
// The outage of a BPP always uses the M interferers on the annulus.
enum class BppDensity {
  NetworkDisk,  // lambda = M / (pi r_net^2)
  Annulus,      // lambda = M / (pi (r_net^2 - r_ex^2)), i.e. M = lambda A
};

struct Scenario {
  net::PointProcess process = net::Bpp{50};
  BppDensity bpp_density = BppDensity::NetworkDisk;
  net::Annulus geom{0.25, 1.0};
  double alpha = 3.0;
  double gamma_snr = 10.0;  // linear
  double omega0 = 1.0;
  std::shared_ptr<const cpfsk::CapacityTable> table;
  // Code gap: operating at threshold beta supports rate C(h, beta - margin).
  double margin_db = 0.0;

  tc::Model model() const;
  double density() const;
  // Interferer count entering the BPP outage.
  double bpp_count() const;
  void validate() const;
};

struct OptResult {
  int lprime = 0;
  double h = 0.0;
  double beta_db = 0.0;
  double rate = 0.0;
  double tau_prime = 0.0;
  std::uint64_t evaluations = 0;
  std::uint64_t iterations = 0;
  std::size_t i_beta = 0, i_h = 0, i_lprime = 0;
};

/// tau' at one operating point: R = C(h, beta - margin), eta(h), eps from the
/// closed-form outage at threshold beta with p = 1/L'.
double objective(double beta_db, double h, double lprime, const Scenario& scenario);

// Objective restricted to a grid, with the per-beta, per-h and per-(beta, h)
// factors computed once. Values are bit-identical to objective().
class GridObjective {
 public:
  GridObjective(const SearchGrid& grid, const Scenario& scenario, int threads = 1);
  double operator()(std::size_t ib, std::size_t ih, std::size_t il) const;
  const SearchGrid& grid() const { return grid_; }
  const Scenario& scenario() const { return scenario_; }
  double rate(std::size_t ib, std::size_t ih) const { return rate_[ib * grid_.n_h() + ih]; }

 private:
  SearchGrid grid_;
  Scenario scenario_;
  std::vector<double> kernel_;  // per beta
  std::vector<double> eta_;     // per h
  std::vector<double> rate_;    // per (beta, h)
};

/// Evaluates every grid point; ties go to the smallest L', then h, then beta.
OptResult exhaustive_search(const SearchGrid& grid, const Scenario& scenario, int threads = 1);
OptResult exhaustive_search(const GridObjective& f, int threads = 1);

/// Nested three-point coordinate search (L' innermost, then h, then beta).
/// Throws NoConvergence after 10^4 outer passes.
OptResult gradient_search(const SearchGrid& grid, const Scenario& scenario);
OptResult gradient_search(const GridObjective& f);

// Maximum of tau' along one coordinate with the other two optimized away.
struct Profile {
  std::vector<double> x;
  std::vector<OptResult> best;
};
struct Profiles {
  Profile vs_lprime, vs_h, vs_beta;
};
Profiles exhaustive_profiles(const GridObjective& f, int threads = 1);

/// tau' at a given code rate: the threshold is C^-1(R) + margin at index h.
double tau_at_rate(double rate, double h, double lprime, const Scenario& scenario);

/// Maximum of tau' at each code rate R, over h and L', with the threshold set
/// by the rate: beta = C^-1(R) + margin for each h. Rates a modulation index
/// cannot reach are skipped for that index.
Profile rate_profile(const SearchGrid& grid, const Scenario& scenario, const std::vector<double>& rates);

}  // namespace fhtc::opt
