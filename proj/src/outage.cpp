#include "fhtc/outage.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fhtc/error.hpp"
#include "fhtc/parallel.hpp"
#include "fhtc/specfun.hpp"

namespace fhtc::outage {

namespace {

constexpr std::uint64_t kChunkTrials = 4096;

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("collision probability must lie in [0, 1]");
}

// log of prod_i (1 - p_i beta0 / (beta0 + Omega_i))
template <class PAt>
double log_survival_product(double beta0, const net::NetworkRealization& real, PAt p_at) {
  double acc = 0.0;
  for (std::size_t i = 0; i < real.m(); ++i) {
    const double om = real.omegas[i];
    if (!(om > 0.0)) throw InvalidArgument("conditional_outage: Omega_i must be positive");
    acc += std::log1p(-p_at(i) * beta0 / (beta0 + om));
  }
  return acc;
}

Estimate binomial_estimate(std::uint64_t hits, std::uint64_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

// Per trial: Z = g0 / (beta Omega0) - sum_i I_i g_i / Omega_i; outage iff
// Z <= z. Trials run in chunks, chunk c reading the stream from block
// c << 32, so the estimate does not depend on how chunks are scheduled.
// Every interferer consumes its two draws whether or not it collides, which
// keeps draws aligned across collision probabilities.
std::vector<Estimate> fading_curve(const OutageQuery& q, const net::NetworkRealization& real,
                                   std::span<const double> p, std::span<const double> zs,
                                   std::uint64_t trials, const RngStream& rng, int threads) {
  q.validate();
  if (trials == 0) throw InvalidArgument("mc_fading_outage: need at least one trial");
  if (p.size() != real.m()) throw InvalidArgument("mc_fading_outage: one collision probability per interferer");
  for (double pi : p) check_probability(pi);
  for (double om : real.omegas)
    if (!(om > 0.0)) throw InvalidArgument("mc_fading_outage: Omega_i must be positive");
  for (double z : zs)
    if (!(z >= 0.0)) throw InvalidArgument("mc_fading_outage: z must be nonnegative");

  const double b0 = q.beta0();
  const std::size_t nz = zs.size();
  const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<std::uint64_t> hits(chunks * nz, 0);
  parallel_for(chunks, threads, [&](std::uint64_t c) {
    RngStream r = rng.at_block(rng.block() + (c << 32));
    const std::uint64_t n = std::min(kChunkTrials, trials - c * kChunkTrials);
    for (std::uint64_t t = 0; t < n; ++t) {
      double zm = r.exponential() / b0;
      for (std::size_t i = 0; i < real.m(); ++i) {
        const bool on = r.bernoulli(p[i]);
        const double g = r.exponential();
        if (on) zm -= g / real.omegas[i];
      }
      for (std::size_t k = 0; k < nz; ++k) hits[c * nz + k] += zm <= zs[k];
    }
  });
  std::vector<Estimate> out;
  for (std::size_t k = 0; k < nz; ++k) {
    std::uint64_t total = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) total += hits[c * nz + k];
    out.push_back(binomial_estimate(total, trials));
  }
  return out;
}

}  // namespace

void OutageQuery::validate() const {
  params.validate();
  if (!(beta > 0.0)) throw InvalidArgument("outage: threshold must be positive");
  if (!(z >= 0.0)) throw InvalidArgument("outage: z must be nonnegative");
}

double one_minus_exp_neg(double x) { return -std::expm1(-x); }

double conditional_outage(const OutageQuery& q, const net::NetworkRealization& real) {
  q.validate();
  const double p = q.params.collision_probability();
  const double b0 = q.beta0();
  return one_minus_exp_neg(b0 * q.z - log_survival_product(b0, real, [p](std::size_t) { return p; }));
}

double conditional_outage(const OutageQuery& q, const net::NetworkRealization& real,
                          std::span<const double> p) {
  q.validate();
  if (p.size() != real.m()) throw InvalidArgument("conditional_outage: one collision probability per interferer");
  for (double pi : p) check_probability(pi);
  const double b0 = q.beta0();
  return one_minus_exp_neg(b0 * q.z - log_survival_product(b0, real, [p](std::size_t i) { return p[i]; }));
}

Estimate mc_fading_outage(const OutageQuery& q, const net::NetworkRealization& real,
                          std::uint64_t trials, const RngStream& rng, int threads) {
  std::vector<double> p(real.m(), q.params.collision_probability());
  return mc_fading_outage(q, real, p, trials, rng, threads);
}

Estimate mc_fading_outage(const OutageQuery& q, const net::NetworkRealization& real,
                          std::span<const double> p, std::uint64_t trials, const RngStream& rng,
                          int threads) {
  return fading_curve(q, real, p, std::span<const double>(&q.z, 1), trials, rng, threads).front();
}

std::vector<Estimate> mc_fading_outage_curve(const OutageQuery& q, const net::NetworkRealization& real,
                                             std::span<const double> zs, std::uint64_t trials,
                                             const RngStream& rng, int threads) {
  std::vector<double> p(real.m(), q.params.collision_probability());
  return fading_curve(q, real, p, zs, trials, rng, threads);
}

double interference_kernel(const net::Annulus& geom, double alpha, double beta0) {
  geom.validate();
  if (!(alpha >= 2.0)) throw InvalidArgument("path-loss exponent must be >= 2");
  if (!(beta0 > 0.0)) throw InvalidArgument("beta0 must be positive");
  const double hi = specfun::collision_kernel(std::pow(geom.r_net, alpha), alpha, beta0);
  const double lo = geom.r_ex > 0.0 ? specfun::collision_kernel(std::pow(geom.r_ex, alpha), alpha, beta0) : 0.0;
  return geom.kappa() * (hi - lo);
}

double bpp_outage_from_kernel(double beta0, double z, double p, double kernel, double m) {
  if (!(m >= 0.0)) throw InvalidArgument("bpp_outage: interferer count must be nonnegative");
  check_probability(p);
  const double interference = m == 0.0 ? 0.0 : -m * std::log1p(-p * kernel);
  return one_minus_exp_neg(beta0 * z + interference);
}

double bpp_outage(const OutageQuery& q, const net::Annulus& geom, double m) {
  q.validate();
  const double b0 = q.beta0();
  return bpp_outage_from_kernel(b0, q.z, q.params.collision_probability(),
                                interference_kernel(geom, q.params.alpha, b0), m);
}

Estimate mc_spatial_outage(const OutageQuery& q, const net::PointProcess& process,
                           const net::Annulus& geom, std::uint64_t n_networks, const RngStream& rng,
                           int threads) {
  q.validate();
  geom.validate();
  if (n_networks == 0) throw InvalidArgument("mc_spatial_outage: need at least one network");
  std::vector<double> values(n_networks);
  parallel_for(n_networks, threads, [&](std::uint64_t k) {
    RngStream r = rng.at_block(rng.block() + (k << 32));
    values[k] = conditional_outage(q, net::sample(process, geom, q.params.alpha, r));
  });
  // Welford, in network order: identical networks give exactly zero variance.
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t k = 0; k < n_networks; ++k) {
    const double d = values[k] - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (values[k] - mean);
  }
  const double var = n_networks > 1 ? m2 / static_cast<double>(n_networks - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_networks)), n_networks};
}

double ppp_outage_from_kernel(double beta0, double z, double p, double kernel, double area,
                              double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("ppp_outage: density must be nonnegative");
  check_probability(p);
  return one_minus_exp_neg(beta0 * z + lambda * area * p * kernel);
}

double ppp_outage(const OutageQuery& q, const net::Annulus& geom, double lambda) {
  q.validate();
  const double b0 = q.beta0();
  return ppp_outage_from_kernel(b0, q.z, q.params.collision_probability(),
                                interference_kernel(geom, q.params.alpha, b0), geom.area(), lambda);
}

double infinite_kernel_constant(double alpha) {
  if (!(alpha > 2.0)) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / std::sin(2.0 * std::numbers::pi / alpha);
}

double infinite_ppp_outage(const OutageQuery& q, double lambda, double r_ex) {
  q.validate();
  if (q.params.collision_probability() != 1.0)
    throw InvalidArgument("infinite_ppp_outage: the limit assumes p = 1");
  if (r_ex != 0.0) throw InvalidArgument("infinite_ppp_outage: the limit assumes r_ex = 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("infinite_ppp_outage: density must be nonnegative");
  const double b0 = q.beta0();
  const double a = q.params.alpha;
  if (lambda == 0.0) return one_minus_exp_neg(b0 * q.z);
  return one_minus_exp_neg(b0 * q.z + 2.0 * std::numbers::pi * lambda / a * std::pow(b0, 2.0 / a) *
                                          infinite_kernel_constant(a));
}

}  // namespace fhtc::outage
