#include "tracethresh/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracethresh/errors.hpp"
#include "tracethresh/quadrature.hpp"

namespace tracethresh {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DistributionSpec DistributionSpec::constant(double value) {
  if (!(value >= 0.0)) throw InvalidConfig("constant distribution needs value >= 0");
  DistributionSpec d;
  d.kind_ = value == 0.0 ? DistKind::Zero : DistKind::Constant;
  d.value_ = value;
  return d;
}

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidConfig("exponential distribution needs rate > 0");
  DistributionSpec d;
  d.kind_ = DistKind::Exponential;
  d.rate_ = rate;
  return d;
}

DistributionSpec DistributionSpec::gamma(double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0)) {
    throw InvalidConfig("gamma distribution needs mean > 0 and shape > 0");
  }
  DistributionSpec d;
  d.kind_ = DistKind::Gamma;
  d.mean_ = mean;
  d.shape_ = shape;
  return d;
}

double DistributionSpec::mean() const {
  switch (kind_) {
    case DistKind::Zero: return 0.0;
    case DistKind::Constant: return value_;
    case DistKind::Exponential: return 1.0 / rate_;
    case DistKind::Gamma: return mean_;
  }
  return 0.0;
}

double DistributionSpec::variance() const {
  switch (kind_) {
    case DistKind::Zero:
    case DistKind::Constant: return 0.0;
    case DistKind::Exponential: return 1.0 / (rate_ * rate_);
    case DistKind::Gamma: return mean_ * mean_ / shape_;
  }
  return 0.0;
}

double DistributionSpec::mgf(double theta) const {
  switch (kind_) {
    case DistKind::Zero: return 1.0;
    case DistKind::Constant: return std::exp(-theta * value_);
    case DistKind::Exponential: return rate_ / (rate_ + theta);
    case DistKind::Gamma: return std::pow(1.0 + mean_ * theta / shape_, -shape_);
  }
  return 1.0;
}

double DistributionSpec::pdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind_) {
    case DistKind::Exponential: return rate_ * std::exp(-rate_ * x);
    case DistKind::Gamma: {
      const double scale = mean_ / shape_;
      if (x == 0.0) return shape_ > 1.0 ? 0.0 : (shape_ == 1.0 ? 1.0 / scale : kInf);
      const double logpdf = (shape_ - 1.0) * std::log(x) - x / scale -
                            std::lgamma(shape_) - shape_ * std::log(scale);
      return std::exp(logpdf);
    }
    default: return 0.0;  // atomic kinds have no density
  }
}

double DistributionSpec::sample(RngStream& rng) const {
  switch (kind_) {
    case DistKind::Zero: return 0.0;
    case DistKind::Constant: return value_;
    case DistKind::Exponential: return rng.exponential(rate_);
    case DistKind::Gamma: return rng.gamma(shape_, mean_ / shape_);
  }
  return 0.0;
}

DistributionSpec DistributionSpec::scaled_time(double factor) const {
  switch (kind_) {
    case DistKind::Zero: return zero();
    case DistKind::Constant: return constant(value_ * factor);
    case DistKind::Exponential: return exponential(rate_ / factor);
    case DistKind::Gamma: return gamma(mean_ * factor, shape_);
  }
  return zero();
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return zero();
  if (kind == "constant") return constant(j.at("value").get<double>());
  if (kind == "exponential") return exponential(j.at("rate").get<double>());
  if (kind == "gamma") return gamma(j.at("mean").get<double>(), j.at("shape").get<double>());
  throw InvalidConfig("unknown distribution kind: " + kind);
}

nlohmann::json DistributionSpec::to_json() const {
  switch (kind_) {
    case DistKind::Zero: return {{"kind", "zero"}};
    case DistKind::Constant: return {{"kind", "constant"}, {"value", value_}};
    case DistKind::Exponential: return {{"kind", "exponential"}, {"rate", rate_}};
    case DistKind::Gamma: return {{"kind", "gamma"}, {"mean", mean_}, {"shape", shape_}};
  }
  return {};
}

namespace {

// Continuous density slice coef * e^{-rate x} on (lo, hi).
struct ExpPiece {
  double lo, hi;
  double coef, rate;
};

struct DiffParts {
  bool has_atom = false;
  double atom_pos = 0.0;
  std::vector<ExpPiece> pieces;
  bool closed_form = true;
};

DiffParts decompose(const DiffLaw& law) {
  DiffParts parts;
  const auto& d = law.delay;
  const auto& l = law.latent;
  if (d.kind() == DistKind::Gamma || l.kind() == DistKind::Gamma) {
    parts.closed_form = false;
    return parts;
  }
  if (d.is_atomic() && l.is_atomic()) {
    parts.has_atom = true;
    parts.atom_pos = d.atom() - l.atom();
    return parts;
  }
  if (!d.is_atomic() && l.is_atomic()) {
    // X = T_D - l: density xi e^{-xi (x + l)} on (-l, inf).
    const double xi = d.rate();
    parts.pieces.push_back({-l.atom(), kInf, xi * std::exp(-xi * l.atom()), xi});
    return parts;
  }
  if (d.is_atomic() && !l.is_atomic()) {
    // X = c - T_L: density nu e^{-nu (c - x)} on (-inf, c).
    const double nu = l.rate();
    parts.pieces.push_back({-kInf, d.atom(), nu * std::exp(-nu * d.atom()), -nu});
    return parts;
  }
  // Both exponential: two-sided exponential density.
  const double xi = d.rate();
  const double nu = l.rate();
  const double c = xi * nu / (xi + nu);
  parts.pieces.push_back({-kInf, 0.0, c, -nu});
  parts.pieces.push_back({0.0, kInf, c, xi});
  return parts;
}

// J_j(q, delta) = integral of y^j e^{-q y} over [0, delta], j <= 2.
double j_moment(int j, double q, double delta) {
  const double qd = q * delta;
  if (std::abs(qd) <= 1.0) {
    // Power series in (-q delta); converges in ~20 terms.
    double term = 1.0;  // (-qd)^n / n!
    double sum = 0.0;
    for (int n = 0; n < 40; ++n) {
      const double contrib = term / (j + n + 1);
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
      term *= -qd / (n + 1);
    }
    return std::pow(delta, j + 1) * sum;
  }
  const double e = std::exp(-qd);
  switch (j) {
    case 0: return (1.0 - e) / q;
    case 1: return (1.0 - e * (qd + 1.0)) / (q * q);
    default: return (2.0 - e * (qd * qd + 2.0 * qd + 2.0)) / (q * q * q);
  }
}

// integral of x^k e^{-q x} over [u, v]; u may be -inf (needs q < 0) and
// v may be +inf (needs q > 0).
double power_exp_integral(int k, double q, double u, double v) {
  if (u >= v) return 0.0;
  if (std::isinf(u) && std::isinf(v)) throw NumericalError("divergent moment integral");
  if (std::isinf(v)) {
    if (!(q > 0.0)) throw NumericalError("divergent moment integral");
    // integral_u^inf x^k e^{-qx} = e^{-qu} sum_j C(k,j) u^{k-j} j!/q^{j+1}
    const double e = std::exp(-q * u);
    switch (k) {
      case 0: return e / q;
      case 1: return e * (u / q + 1.0 / (q * q));
      default: return e * (u * u / q + 2.0 * u / (q * q) + 2.0 / (q * q * q));
    }
  }
  if (std::isinf(u)) {
    // Mirror x -> -x reduces to the upper-infinite case with rate -q.
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * power_exp_integral(k, -q, -v, kInf);
  }
  // Finite interval: shift to y = x - u and expand (u + y)^k.
  const double delta = v - u;
  const double e = std::exp(-q * u);
  switch (k) {
    case 0: return e * j_moment(0, q, delta);
    case 1: return e * (u * j_moment(0, q, delta) + j_moment(1, q, delta));
    default:
      return e * (u * u * j_moment(0, q, delta) + 2.0 * u * j_moment(1, q, delta) +
                  j_moment(2, q, delta));
  }
}

double piece_integral(const ExpPiece& piece, const Integrand& g, double lo, double hi) {
  const double u = std::max(piece.lo, lo);
  const double v = std::min(piece.hi, hi);
  if (!(u < v)) return 0.0;
  double total = 0.0;
  if (g.p0 != 0.0) total += g.p0 * power_exp_integral(0, piece.rate, u, v);
  if (g.p1 != 0.0) total += g.p1 * power_exp_integral(1, piece.rate, u, v);
  if (g.p2 != 0.0) total += g.p2 * power_exp_integral(2, piece.rate, u, v);
  if (g.amp != 0.0) total += g.amp * power_exp_integral(0, piece.rate + g.decay, u, v);
  return piece.coef * total;
}

bool atom_in_range(double pos, Bound lo, Bound hi) {
  const bool above = pos > lo.value || (lo.inclusive && pos == lo.value);
  const bool below = pos < hi.value || (hi.inclusive && pos == hi.value);
  return above && below;
}

}  // namespace

double trunc_expect(const DiffLaw& law, const Integrand& g, Bound lo, Bound hi) {
  const DiffParts parts = decompose(law);
  if (!parts.closed_form) return trunc_expect_quadrature(law, g, lo, hi);
  double total = 0.0;
  if (parts.has_atom && atom_in_range(parts.atom_pos, lo, hi)) total += g(parts.atom_pos);
  for (const auto& piece : parts.pieces) total += piece_integral(piece, g, lo.value, hi.value);
  return total;
}

double trunc_expect_quadrature(const DiffLaw& law, const Integrand& g, Bound lo, Bound hi) {
  const auto& d = law.delay;
  const auto& l = law.latent;
  const double a = lo.value;
  const double b = hi.value;

  if (d.is_atomic() && l.is_atomic()) {
    const double pos = d.atom() - l.atom();
    return atom_in_range(pos, lo, hi) ? g(pos) : 0.0;
  }

  // Truncated moments can be exactly zero (odd integrands over ranges
  // straddling zero), so the relative target needs an absolute floor.
  // Downstream finite differences divide these values by steps of ~1e-3,
  // hence the tight targets.
  QuadOptions outer_opt;
  outer_opt.rel_tol = 1e-11;
  outer_opt.abs_tol = 1e-15;
  QuadOptions inner_opt;
  inner_opt.rel_tol = 1e-12;
  inner_opt.abs_tol = 1e-17;

  if (l.is_atomic()) {
    // X = T_D - l, so T_D ranges over (a + l, b + l) clipped to [0, inf).
    const double shift = l.atom();
    const double t_lo = std::max(0.0, a + shift);
    const double t_hi = b + shift;
    if (!(t_lo < t_hi)) return 0.0;
    return integrate([&](double t) { return d.pdf(t) * g(t - shift); }, t_lo, t_hi, outer_opt);
  }
  if (d.is_atomic()) {
    // X = c - T_L, so T_L ranges over (c - b, c - a) clipped to [0, inf).
    const double c = d.atom();
    const double u_lo = std::max(0.0, c - b);
    const double u_hi = c - a;
    if (!(u_lo < u_hi)) return 0.0;
    return integrate([&](double u) { return l.pdf(u) * g(c - u); }, u_lo, u_hi, outer_opt);
  }

  // Both continuous: iterate the expectation over the latent draw.
  auto outer = [&](double u) {
    const double t_lo = std::max(0.0, a + u);
    const double t_hi = b + u;
    if (!(t_lo < t_hi)) return 0.0;
    const double inner =
        integrate([&](double t) { return d.pdf(t) * g(t - u); }, t_lo, t_hi, inner_opt);
    return l.pdf(u) * inner;
  };
  return integrate(outer, 0.0, kInf, outer_opt);
}

}  // namespace tracethresh
