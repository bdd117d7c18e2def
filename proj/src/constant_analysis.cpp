#include "tracethresh/constant_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracethresh/errors.hpp"

namespace tracethresh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_const_case(const ModelParams& params) {
  params.validate();
  if (params.infectious.kind() != DistKind::Constant || !(params.infectious.value() > 0.0)) {
    throw InvalidConfig("constant-period analysis needs a Constant(iota > 0) infectious law");
  }
  if (params.pi_t != 0.0) {
    throw InvalidConfig("constant-period analysis needs pi_t = 0");
  }
  return params.infectious.value();
}

}  // namespace

TracedFateProbs fate_probs(const ModelParams& params) {
  const double iota = require_const_case(params);
  const DiffLaw law{params.delay, params.latent};
  const double p_tail = trunc_expect(law, Integrand::one(), open_bound(iota), plus_infinity());
  const double mid = trunc_expect(law, Integrand::x(), closed_bound(0.0), closed_bound(iota));
  const double p_n = p_tail + mid / iota;

  const double p_low = trunc_expect(law, Integrand::one(), minus_infinity(), closed_bound(-iota));
  const double neg_mid =
      trunc_expect(law, Integrand::neg_x(), open_bound(-iota), closed_bound(0.0));
  const double p_t = p_low + neg_mid / iota;
  return {p_n, p_t};
}

MeanMatrix mean_matrix(const ModelParams& params) {
  const double iota = require_const_case(params);
  const double lam = params.lambda;
  const double named_frac = params.pi_r * params.p;
  const DiffLaw law{params.delay, params.latent};
  const double p_n = fate_probs(params).p_n;

  MeanMatrix m;
  m.m_uu = lam * (1.0 - named_frac) * iota;
  m.m_un = lam * named_frac * iota;
  if (named_frac == 0.0) {
    // Named individuals are never created; their row is zero by convention.
    m.m_nu = 0.0;
    m.m_nn = 0.0;
    return m;
  }
  m.m_nn = lam * named_frac * iota * p_n;

  const double sq_left =
      trunc_expect(law, Integrand::shifted_square(iota), open_bound(-iota), open_bound(0.0));
  const double prob_mid = trunc_expect(law, Integrand::one(), closed_bound(0.0), open_bound(iota));
  const double sq_mid =
      trunc_expect(law, Integrand::x_squared(), closed_bound(0.0), open_bound(iota));
  m.m_nu = lam * (1.0 - named_frac) * iota * p_n +
           (lam / (2.0 * iota)) * (sq_left + iota * iota * prob_mid - sq_mid);
  return m;
}

double r0(const ModelParams& params) {
  const MeanMatrix m = mean_matrix(params);
  const double diff = m.m_uu - m.m_nn;
  return 0.5 * (m.m_uu + m.m_nn + std::sqrt(diff * diff + 4.0 * m.m_un * m.m_nu));
}

double pgf_u(const ModelParams& params, double s_u, double s_n) {
  const double iota = require_const_case(params);
  const double li = params.lambda * iota;
  return (1.0 - params.pi_r) * std::exp(-li * (1.0 - s_u)) +
         params.pi_r * std::exp(-li * (1.0 - (1.0 - params.p) * s_u - params.p * s_n));
}

double pgf_n(const ModelParams& params, double s_u, double s_n) {
  const double iota = require_const_case(params);
  if (params.pi_r * params.p == 0.0) return 1.0;  // named type unreachable
  const DiffLaw law{params.delay, params.latent};
  const TracedFateProbs fate = fate_probs(params);
  const double theta = params.lambda * (1.0 - s_u);

  double traced_term;
  if (theta * std::max(iota, 1.0) < 1e-8) {
    // theta -> 0 limit: the traced-while-active contribution collapses to
    // its probability mass P(0 < V + X < iota).
    const double left_mass =
        trunc_expect(law, Integrand::one(), open_bound(-iota), open_bound(0.0));
    const double left_mean = trunc_expect(law, Integrand::x(), open_bound(-iota), open_bound(0.0));
    const double prob_mid =
        trunc_expect(law, Integrand::one(), closed_bound(0.0), open_bound(iota));
    const double mid_mean = trunc_expect(law, Integrand::x(), closed_bound(0.0), open_bound(iota));
    traced_term =
        (iota * left_mass + left_mean + iota * prob_mid - mid_mean) / iota;
  } else {
    const double prob_left =
        trunc_expect(law, Integrand::one(), open_bound(-iota), open_bound(0.0));
    const double exp_left = trunc_expect(law, Integrand::shifted_exp_decay(iota, theta),
                                         open_bound(-iota), open_bound(0.0));
    const double exp_mid = trunc_expect(law, Integrand::exp_decay(theta), closed_bound(0.0),
                                        open_bound(iota));
    const double prob_mid =
        trunc_expect(law, Integrand::one(), closed_bound(0.0), open_bound(iota));
    traced_term =
        (prob_left - exp_left + exp_mid - std::exp(-theta * iota) * prob_mid) / (theta * iota);
  }
  return fate.p_t + fate.p_n * pgf_u(params, s_u, s_n) + traced_term;
}

ConstExtinction extinction_const(const ModelParams& params) {
  require_const_case(params);
  if (r0(params) <= 1.0) return {1.0, 1.0, 1.0};
  double q_u = 0.0;
  double q_n = 0.0;
  for (long iter = 0; iter < 1000000; ++iter) {
    const double next_u = pgf_u(params, q_u, q_n);
    const double next_n = pgf_n(params, q_u, q_n);
    const double step = std::max(std::abs(next_u - q_u), std::abs(next_n - q_n));
    q_u = next_u;
    q_n = next_n;
    if (step < 1e-12) {
      return {q_u, q_n, std::pow(q_u, params.initial_infectives)};
    }
  }
  throw NoConvergence("extinction fixed point did not converge");
}

double ru_const(const ModelParams& params) {
  const MeanMatrix m = mean_matrix(params);
  if (m.m_nn >= 1.0) return kInf;
  return m.m_uu + m.m_un * m.m_nu / (1.0 - m.m_nn);
}

double lambda_star_const(const ModelParams& params) {
  const double iota = require_const_case(params);
  const double p_n = fate_probs(params).p_n;
  const double denom = params.pi_r * params.p * iota * p_n;
  return denom > 0.0 ? 1.0 / denom : kInf;
}

}  // namespace tracethresh
