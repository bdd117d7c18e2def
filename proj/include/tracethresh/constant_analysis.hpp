#pragma once

#include "tracethresh/model_params.hpp"

namespace tracethresh {

// Analytics for a fixed-length infectious period where only untraced
// individuals are interviewed (pi_t = 0). The early epidemic is then a
// two-type branching process over unnamed/named individuals.

// Fate of a named individual relative to its tracing delay.
struct TracedFateProbs {
  double p_n;  // dies naturally before the tracing delay ends (stays untraced)
  double p_t;  // traced before its latent period ends (no offspring at all)
};

// Expected offspring counts by parent/child type.
struct MeanMatrix {
  double m_uu, m_un;
  double m_nu, m_nn;
};

struct ConstExtinction {
  double q_u;    // extinction probability from one unnamed individual
  double q_n;    // extinction probability from one named individual
  double p_ext;  // q_u^m for the configured initial infectives
};

TracedFateProbs fate_probs(const ModelParams& params);

MeanMatrix mean_matrix(const ModelParams& params);

// Perron eigenvalue of the mean matrix; the process dies out almost surely
// iff this is <= 1.
double r0(const ModelParams& params);

// Joint offspring generating functions E[s_U^{Z_U} s_N^{Z_N}] for an
// unnamed and a named parent, on [0,1]^2.
double pgf_u(const ModelParams& params, double s_u, double s_n);
double pgf_n(const ModelParams& params, double s_u, double s_n);

// Minimal fixed point of (pgf_u, pgf_n) from (0,0); (1,1,1) when r0 <= 1.
ConstExtinction extinction_const(const ModelParams& params);

// Mean offspring of an unnamed individual counting descendants reached
// through named intermediaries; +infinity when m_nn >= 1.
double ru_const(const ModelParams& params);

// Contact rate above which ru_const is infinite: 1/(pi_r p iota p_n).
double lambda_star_const(const ModelParams& params);

}  // namespace tracethresh
