#include "fhtc/tc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fhtc/error.hpp"

namespace fhtc::tc {

namespace {

// -log(1 - zeta) - beta0/Gamma, snapped to zero within rounding of the
// noise floor; negative values mean the constraint cannot be met.
double excess_budget(const TcQuery& q) {
  const double noise = q.beta0() / q.params.gamma_snr;
  const double budget = -std::log1p(-q.zeta) - noise;
  if (std::fabs(budget) <= 8.0 * std::numeric_limits<double>::epsilon() * noise) return 0.0;
  if (budget > 0.0) return budget;
  throw InfeasibleConstraint("outage constraint lies below the noise-only floor");
}

double kernel(const TcQuery& q) { return outage::interference_kernel(q.geom, q.params.alpha, q.beta0()); }

}  // namespace

double TcQuery::noise_floor() const { return outage::one_minus_exp_neg(beta0() / params.gamma_snr); }

void TcQuery::validate() const {
  params.validate();
  geom.validate();
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidArgument("tc: outage constraint must lie in (0, 1)");
  if (!(beta > 0.0)) throw InvalidArgument("tc: threshold must be positive");
}

double density_at_outage_bpp(const TcQuery& q) {
  q.validate();
  const double budget = excess_budget(q);
  const double p = q.params.collision_probability();
  if (budget == 0.0) return 0.0;
  const double log_bracket = std::log1p(-p * kernel(q));
  if (log_bracket == 0.0) return std::numeric_limits<double>::infinity();
  return -budget / (q.geom.area() * log_bracket);
}

double density_at_outage_ppp(const TcQuery& q) {
  q.validate();
  const double budget = excess_budget(q);
  const double p = q.params.collision_probability();
  if (budget == 0.0) return 0.0;
  const double denom = q.geom.area() * p * kernel(q);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return budget / denom;
}

double tc_bpp(const TcQuery& q) { return (1.0 - q.zeta) * density_at_outage_bpp(q); }

double tc_ppp(const TcQuery& q) { return (1.0 - q.zeta) * density_at_outage_ppp(q); }

double tc_infinite(double zeta, double beta0, double gamma_snr, double alpha) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidArgument("tc: outage constraint must lie in (0, 1)");
  if (!(beta0 > 0.0) || !(gamma_snr > 0.0)) throw InvalidArgument("tc: threshold and SNR must be positive");
  if (!(alpha > 2.0)) throw InvalidArgument("tc_infinite: needs alpha > 2");
  TcQuery q;
  q.zeta = zeta;
  q.beta = beta0;
  q.params.gamma_snr = gamma_snr;
  const double budget = excess_budget(q);
  const double c = 2.0 * std::numbers::pi / alpha;
  return (1.0 - zeta) * budget / (std::numbers::pi * std::pow(beta0, 2.0 / alpha) * c / std::sin(c));
}

void TcObjective::validate() const {
  if (!(density >= 0.0)) throw InvalidArgument("tc: density must be nonnegative");
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("tc: code rate must lie in [0, 1]");
  if (!(eta > 0.0)) throw InvalidArgument("tc: spectral efficiency must be positive");
  if (!(lprime >= 1.0)) throw InvalidArgument("tc: need L' >= 1");
  if (!(bandwidth_hz > 0.0)) throw InvalidArgument("tc: bandwidth must be positive");
}

double throughput(const TcObjective& obj, double eps) {
  obj.validate();
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("tc: outage probability must lie in [0, 1]");
  return obj.rate * obj.eta * obj.bandwidth_hz * (1.0 - eps) / obj.lprime;
}

double modconstrained_tc_unnormalized(const TcObjective& obj, double eps) {
  return obj.density * throughput(obj, eps);
}

double modconstrained_tc(const TcObjective& obj, double eps) {
  TcObjective unit = obj;
  unit.bandwidth_hz = 1.0;
  return modconstrained_tc_unnormalized(unit, eps);
}

double modconstrained_tc(const TcObjective& obj, Model model, const net::Annulus& geom,
                         const outage::OutageQuery& q) {
  obj.validate();
  q.validate();
  const double b0 = q.beta0();
  const double k = outage::interference_kernel(geom, q.params.alpha, b0);
  const double p = 1.0 / obj.lprime;
  const double eps = model == Model::Bpp
                         ? outage::bpp_outage_from_kernel(b0, q.z, p, k, obj.density * geom.area())
                         : outage::ppp_outage_from_kernel(b0, q.z, p, k, geom.area(), obj.density);
  return modconstrained_tc(obj, eps);
}

}  // namespace fhtc::tc
