#pragma once

#include <nlohmann/json_fwd.hpp>

#include "tracethresh/rng.hpp"

namespace tracethresh {

enum class DistKind { Zero, Constant, Exponential, Gamma };

// A nonnegative duration law: degenerate (zero or fixed), exponential, or
// gamma. Covers latent periods, infectious periods and tracing delays.
class DistributionSpec {
 public:
  DistributionSpec() : kind_(DistKind::Zero) {}

  static DistributionSpec zero() { return DistributionSpec(); }
  static DistributionSpec constant(double value);
  static DistributionSpec exponential(double rate);
  static DistributionSpec gamma(double mean, double shape);

  DistKind kind() const { return kind_; }
  bool is_atomic() const { return kind_ == DistKind::Zero || kind_ == DistKind::Constant; }
  // Position of the point mass; only meaningful for atomic kinds.
  double atom() const { return kind_ == DistKind::Constant ? value_ : 0.0; }

  double value() const { return value_; }  // Constant
  double rate() const { return rate_; }    // Exponential
  double shape() const { return shape_; }  // Gamma

  double mean() const;
  double variance() const;

  // E[exp(-theta T)] for theta >= 0; equals 1 at theta = 0.
  double mgf(double theta) const;

  // Density of the continuous kinds at x >= 0.
  double pdf(double x) const;

  double sample(RngStream& rng) const;

  // Law of f*T: all durations multiplied by f (rates divided by f).
  DistributionSpec scaled_time(double factor) const;

  // Literal forms: {"kind":"zero"}, {"kind":"constant","value":v},
  // {"kind":"exponential","rate":r}, {"kind":"gamma","mean":m,"shape":k}.
  static DistributionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  bool operator==(const DistributionSpec&) const = default;

 private:
  DistKind kind_;
  double value_ = 0.0;
  double rate_ = 0.0;
  double mean_ = 0.0;
  double shape_ = 0.0;
};

// Law of the difference T_D - T_L with independent delay and latent draws.
struct DiffLaw {
  DistributionSpec delay;
  DistributionSpec latent;
};

// Weight function for truncated expectations: a quadratic polynomial plus
// an exponential term, which covers every moment the analysis needs
// (1, x, -x, x^2, (c+x)^2, e^{-sx}, e^{-s(c+x)}).
class Integrand {
 public:
  static Integrand one() { return Integrand(1, 0, 0, 0, 0); }
  static Integrand x() { return Integrand(0, 1, 0, 0, 0); }
  static Integrand neg_x() { return Integrand(0, -1, 0, 0, 0); }
  static Integrand x_squared() { return Integrand(0, 0, 1, 0, 0); }
  static Integrand shifted_square(double c) { return Integrand(c * c, 2 * c, 1, 0, 0); }
  static Integrand exp_decay(double s) { return Integrand(0, 0, 0, 1, s); }
  static Integrand shifted_exp_decay(double c, double s) {
    return Integrand(0, 0, 0, std::exp(-s * c), s);
  }

  double operator()(double xv) const {
    double out = p0 + xv * (p1 + xv * p2);
    if (amp != 0.0) out += amp * std::exp(-decay * xv);
    return out;
  }

  double p0, p1, p2;   // polynomial part
  double amp, decay;   // amp * e^{-decay x}

 private:
  Integrand(double a0, double a1, double a2, double am, double s)
      : p0(a0), p1(a1), p2(a2), amp(am), decay(s) {}
};

// One end of a truncation range. `inclusive` decides whether a point mass
// sitting exactly on the boundary is counted.
struct Bound {
  double value;
  bool inclusive;
};

inline Bound open_bound(double v) { return Bound{v, false}; }
inline Bound closed_bound(double v) { return Bound{v, true}; }
inline Bound minus_infinity() { return Bound{-std::numeric_limits<double>::infinity(), false}; }
inline Bound plus_infinity() { return Bound{std::numeric_limits<double>::infinity(), false}; }

// E[g(T_D - T_L) restricted to lo..hi]. Exact closed forms whenever both
// laws are degenerate or exponential; adaptive quadrature over the
// convolution otherwise. Throws NonConvergedQuadrature on tolerance failure.
double trunc_expect(const DiffLaw& law, const Integrand& g, Bound lo, Bound hi);

// Always integrates numerically (the closed-form path's independent check).
double trunc_expect_quadrature(const DiffLaw& law, const Integrand& g, Bound lo, Bound hi);

}  // namespace tracethresh
