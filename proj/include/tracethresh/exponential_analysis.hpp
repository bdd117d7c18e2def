#pragma once

#include <vector>

#include "tracethresh/model_params.hpp"

namespace tracethresh {

// Analytics for exponentially distributed infectious periods and delays.
// All rates are normalized internally so the infectious rate is 1; public
// results are reported back in the caller's time unit.

// Coefficient tables of the Laplace-transform recursion. Entry j of a/rho/b
// holds the j+1'th coefficient (a_1 is a[0]); c[j] = prod_{i<=j} b_i with
// c[0] = 1. The tables stop at the first index where the running product
// can no longer move the series sums at double precision.
struct SeriesTables {
  double xi = 0.0;     // delay rate in infectious-rate units
  double theta = 0.0;  // transform evaluation point
  std::vector<double> a;
  std::vector<double> rho;
  std::vector<double> b;
  std::vector<double> c;
  int truncation_len = 0;
};

struct ExpAnalysisResult {
  double y_star;       // transform value controlling series convergence
  double r_u;          // unnamed-type reproduction number; +inf when not finite
  double lambda_star;  // contact-rate threshold for finiteness of r_u
  bool finite;         // lambda < lambda_star
};

// Requires Exponential infectious and delay laws; throws InvalidConfig
// otherwise.
SeriesTables series_tables(const ModelParams& params, double theta);

// Candidate limit y* of the transform at theta = xi; the true limit
// whenever it is finite and nonnegative.
double y_star(const ModelParams& params);

// Denominator of the y* ratio; its first zero in lambda marks the blow-up.
double y_star_denominator(const ModelParams& params);

// Type-reproduction number over unnamed individuals; +inf at and above
// lambda_star.
double r_u_exp(const ModelParams& params);

// Smallest contact rate at which y* stops being finite and nonnegative,
// located by scanning upward from the infectious rate and bisecting.
// Returns +inf when no blow-up exists below 100x the infectious rate
// (e.g. with no naming). params.lambda is ignored.
double lambda_star_exp(const ModelParams& params);

// Sufficient condition for an infinite reproduction number: any lambda
// strictly above the returned value gives r_u = +inf. Requires
// P(T_D > T_L + epsilon) > 0. Exponential infectious law only; the delay
// and latent laws are arbitrary.
double ru_infinite_sufficiency_bound(const ModelParams& params, double epsilon);

enum class CritCase { ConstR0, ConstRU, ExpRU };

// Contact rate at which the selected reproduction number equals 1,
// found by bisection; params.lambda is ignored.
double lambda_crit(const ModelParams& params, CritCase which);

ExpAnalysisResult analyze_exp(const ModelParams& params);

}  // namespace tracethresh
