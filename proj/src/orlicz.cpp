#include "qsol/orlicz.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "qsol/errors.hpp"
#include "qsol/transform.hpp"

namespace qsol {

namespace {

// Nodal weights w_i V(r_i), dropping nodes where either factor vanishes.
struct WeightedSamples {
  std::vector<double> weight;
  std::vector<double> value;
};

WeightedSamples collect(const DiscreteField& v, const Potential& V) {
  WeightedSamples s;
  const auto r = v.grid().nodes();
  const auto w = v.grid().weights();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double wv = w[i] * V(r[i]);
    if (wv != 0.0 && v[i] != 0.0) {
      s.weight.push_back(wv);
      s.value.push_back(v[i]);
    }
  }
  return s;
}

double objective(const WeightedSamples& s, double zeta) {
  const auto& tc = default_transform();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.weight.size(); ++i) sum += s.weight[i] * tc.L(s.value[i] / zeta);
  return zeta * (1.0 + sum);
}

double slope(const WeightedSamples& s, double zeta) {
  const auto& tc = default_transform();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    const double x = s.value[i] / zeta;
    const double u = tc.f(x);
    sum += s.weight[i] * (u * u - x * TransformCalculus::L_prime_from_u(u));
  }
  return 1.0 + sum;
}

}  // namespace

double orlicz_objective(const DiscreteField& v, const Potential& V, double zeta) {
  if (!(zeta > 0.0)) throw DomainError(fmt::format("orlicz objective: zeta must be > 0, got {}", zeta));
  return objective(collect(v, V), zeta);
}

OrliczNorm orlicz_norm(const DiscreteField& v, const Potential& V) {
  const WeightedSamples s = collect(v, V);
  if (s.weight.empty()) return {};

  double lo = std::log(1e-8);
  double hi = std::log(1e8);
  auto d = [&](double log_zeta) { return slope(s, std::exp(log_zeta)); };
  double d_lo = d(lo);
  double d_hi = d(hi);
  if (!(d_lo < 0.0 && d_hi > 0.0)) {
    lo = std::log(1e-16);
    hi = std::log(1e16);
    d_lo = d(lo);
    d_hi = d(hi);
  }
  if (!(d_lo < 0.0 && d_hi > 0.0)) {
    throw NumericalError(fmt::format(
        "orlicz_norm: no interior minimum on [1e-16, 1e16] (slopes {} at lower end, {} at upper end)",
        d_lo, d_hi));
  }

  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      d, lo, hi, d_lo, d_hi, boost::math::tools::eps_tolerance<double>(44), max_iter);
  // The derivative is monotone, so either end of the final bracket is within
  // tolerance; take the one with the smaller objective.
  const double z0 = std::exp(bracket.first);
  const double z1 = std::exp(bracket.second);
  const double f0 = objective(s, z0);
  const double f1 = objective(s, z1);
  return f0 <= f1 ? OrliczNorm{f0, z0} : OrliczNorm{f1, z1};
}

}  // namespace qsol
