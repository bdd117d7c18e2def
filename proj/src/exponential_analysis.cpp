#include "tracethresh/exponential_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tracethresh/constant_analysis.hpp"
#include "tracethresh/errors.hpp"

namespace tracethresh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSingularTol = 1e-6;
constexpr double kPerturbation = 1e-4;
constexpr double kTruncationFloor = 1e-300;
constexpr int kMaxTerms = 100000;

struct NormalizedExp {
  double lambda;
  double xi;
  double p, pi_r, pi_t;
  DistributionSpec latent;  // in infectious-rate time units
  double gamma;             // original infectious rate
};

NormalizedExp normalize(const ModelParams& params) {
  params.validate();
  if (params.infectious.kind() != DistKind::Exponential) {
    throw InvalidConfig("exponential-period analysis needs an Exponential infectious law");
  }
  if (params.delay.kind() != DistKind::Exponential) {
    throw InvalidConfig("exponential-period analysis needs an Exponential delay law");
  }
  const double gamma = params.infectious.rate();
  NormalizedExp n;
  n.gamma = gamma;
  n.lambda = params.lambda / gamma;
  n.xi = params.delay.rate() / gamma;
  n.p = params.p;
  n.pi_r = params.pi_r;
  n.pi_t = params.pi_t;
  n.latent = params.latent.scaled_time(gamma);
  return n;
}

// Coefficients of the transform recursion for index j >= 1.
//
// The recursion tracks the transform of the offspring count seeded by an
// individual that is certainly interviewed (it is entered only after an
// interview has happened, so its children are named with probability p,
// not pi_r p). The uninterviewed branches contribute the
// (1 - pi_t + (1 - pi_r)/x) weights, evaluated at the transform argument
// of each phi factor. The unnamed-root quantities are affine in this
// recursion's limits: L = lambda (1 - pi_r)/theta^2 + pi_r M.
struct CoefEval {
  const NormalizedExp& n;
  double theta;

  double phi(double t) const { return n.latent.mgf(t); }

  double a(int j) const {
    const double jt = j + theta;
    const double first = n.lambda * (1.0 - n.p) / (jt * jt);
    auto weighted = [this](double x) {
      return phi(x) * (1.0 - n.pi_t + (1.0 - n.pi_r) / x) / ((x + 1.0) * (x + 1.0));
    };
    const double second = n.lambda * n.lambda * n.p * n.xi /
                          (jt * (n.xi - jt)) * (weighted(jt) - weighted(n.xi));
    return first + second;
  }

  double rho(int j) const {
    const double jt = j + theta;
    return n.lambda * n.p * (n.pi_t * n.xi + n.pi_r) * phi(n.xi) / (jt * (n.xi - jt));
  }

  double b(int j) const {
    const double jt = j + theta;
    return n.lambda * n.p * n.xi * (n.pi_t * jt + n.pi_r) * phi(jt) /
           (jt * jt * (n.xi - jt));
  }
};

struct SeriesSums {
  double sum_ca = 0.0;    // sum over i >= 0 of c_i a_{i+1}
  double sum_crho = 0.0;  // sum over i >= 0 of c_i rho_{i+1}
  int truncation_len = 0;
};

SeriesSums series_sums(const NormalizedExp& n, double theta) {
  const CoefEval coef{n, theta};
  SeriesSums out;
  double c = 1.0;
  out.sum_ca = coef.a(1);
  out.sum_crho = coef.rho(1);
  for (int j = 1; j < kMaxTerms; ++j) {
    c *= coef.b(j);
    const double a_next = coef.a(j + 1);
    const double rho_next = coef.rho(j + 1);
    if (c == 0.0 ||
        std::abs(c) * std::max(std::abs(a_next), std::abs(rho_next)) < kTruncationFloor) {
      out.truncation_len = j;
      return out;
    }
    out.sum_ca += c * a_next;
    out.sum_crho += c * rho_next;
  }
  throw NoConvergence("series truncation not reached");
}

// The recursion divides by (xi - j - theta); evaluation within
// kSingularTol of such a pole (or of integer xi) is replaced by the mean
// of two symmetric perturbations of xi, which cancels the pole term.
bool near_pole(double xi, double theta) {
  if (std::abs(xi - std::round(xi)) < kSingularTol) return true;
  const double j_near = std::round(xi - theta);
  return j_near >= 1.0 && std::abs(xi - j_near - theta) < kSingularTol;
}

// Limit transform of the interviewed-root recursion at theta = xi.
double y_tilde_at(const NormalizedExp& n) {
  const SeriesSums sums = series_sums(n, n.xi);
  return sums.sum_ca / (1.0 + sums.sum_crho);
}

// Naming requires at least one interviewed natural removal; without that
// the recursion never starts.
bool naming_active(const NormalizedExp& n) { return n.pi_r * n.p > 0.0; }

double y_star_at(const NormalizedExp& n) {
  const double base = n.lambda * (1.0 - n.pi_r) / ((n.xi + 1.0) * (n.xi + 1.0));
  return base + n.pi_r * y_tilde_at(n);
}

double y_star_normalized(const NormalizedExp& n) {
  if (!naming_active(n)) {
    return n.lambda * (1.0 - n.pi_r * n.p) / ((n.xi + 1.0) * (n.xi + 1.0));
  }
  if (!near_pole(n.xi, n.xi) && !near_pole(n.xi, 0.0)) return y_star_at(n);
  NormalizedExp up = n;
  NormalizedExp down = n;
  up.xi += kPerturbation;
  down.xi -= kPerturbation;
  return 0.5 * (y_star_at(up) + y_star_at(down));
}

double r_u_at(const NormalizedExp& n) {
  const SeriesSums sums = series_sums(n, 0.0);
  const double chain = sums.sum_ca - sums.sum_crho * y_tilde_at(n);
  return n.lambda * (1.0 - n.pi_r) + n.pi_r * chain;
}

double r_u_normalized(const NormalizedExp& n) {
  if (!naming_active(n)) return n.lambda;
  if (!near_pole(n.xi, 0.0) && !near_pole(n.xi, n.xi)) return r_u_at(n);
  NormalizedExp up = n;
  NormalizedExp down = n;
  up.xi += kPerturbation;
  down.xi -= kPerturbation;
  return 0.5 * (r_u_at(up) + r_u_at(down));
}

// y* stays meaningful while the series denominator is positive and the
// ratio is finite and nonnegative.
bool y_star_ok(const NormalizedExp& n) {
  if (near_pole(n.xi, n.xi) || near_pole(n.xi, 0.0)) {
    NormalizedExp up = n;
    NormalizedExp down = n;
    up.xi += kPerturbation;
    down.xi -= kPerturbation;
    return y_star_ok(up) && y_star_ok(down);
  }
  const SeriesSums sums = series_sums(n, n.xi);
  const double denom = 1.0 + sums.sum_crho;
  if (!(denom > 0.0)) return false;
  const double y = sums.sum_ca / denom;
  return std::isfinite(y) && y >= 0.0;
}

// First loss of a finite nonnegative y*, normalized units. Scans upward
// from lambda = 1 in steps of 0.05 and bisects the first failing bracket.
double lambda_star_normalized(NormalizedExp n) {
  constexpr double kScanStep = 0.05;
  constexpr double kScanMax = 100.0;
  constexpr double kWidth = 1e-4;

  if (!naming_active(n)) return kInf;

  auto ok = [&n](double lam) {
    NormalizedExp probe = n;
    probe.lambda = lam;
    return y_star_ok(probe);
  };

  double lo = 1.0;
  if (!ok(lo)) {
    // Should not happen (the threshold exceeds the infectious rate), but
    // track the loss downward rather than reporting a wrong bracket.
    double hi = lo;
    lo = 1e-6;
    if (!ok(lo)) return lo;
    while (hi - lo > kWidth) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  double hi = lo;
  for (;;) {
    hi = lo + kScanStep;
    if (hi > kScanMax) return kInf;
    if (!ok(hi)) break;
    lo = hi;
  }
  while (hi - lo > kWidth) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double bisect_unit_crossing(const std::function<double(double)>& value, double lo, double hi,
                            double tol) {
  double f_lo = value(lo) - 1.0;
  double f_hi = value(hi) - 1.0;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NoBracket("reproduction number does not cross 1 in the bracket");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = value(mid) - 1.0;
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_hi > 0.0)) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SeriesTables series_tables(const ModelParams& params, double theta) {
  NormalizedExp n = normalize(params);
  if (near_pole(n.xi, theta) || near_pole(n.xi, 0.0)) {
    // Tables themselves are only representable away from the pole; nudge
    // the rate (derived scalars average both perturbations instead).
    n.xi += kPerturbation;
  }
  const CoefEval coef{n, theta};
  SeriesTables tables;
  tables.xi = n.xi;
  tables.theta = theta;
  tables.c.push_back(1.0);
  double c = 1.0;
  for (int j = 1; j < kMaxTerms; ++j) {
    tables.a.push_back(coef.a(j));
    tables.rho.push_back(coef.rho(j));
    const double bj = coef.b(j);
    tables.b.push_back(bj);
    c *= bj;
    tables.c.push_back(c);
    const double next = std::max(std::abs(coef.a(j + 1)), std::abs(coef.rho(j + 1)));
    if (c == 0.0 || std::abs(c) * next < kTruncationFloor) {
      tables.truncation_len = j;
      return tables;
    }
  }
  throw NoConvergence("series truncation not reached");
}

double y_star(const ModelParams& params) {
  return y_star_normalized(normalize(params));
}

double y_star_denominator(const ModelParams& params) {
  const NormalizedExp n = normalize(params);
  if (!naming_active(n)) return 1.0;
  auto denom_at = [](const NormalizedExp& m) {
    return 1.0 + series_sums(m, m.xi).sum_crho;
  };
  if (!near_pole(n.xi, n.xi) && !near_pole(n.xi, 0.0)) return denom_at(n);
  NormalizedExp up = n;
  NormalizedExp down = n;
  up.xi += kPerturbation;
  down.xi -= kPerturbation;
  return 0.5 * (denom_at(up) + denom_at(down));
}

double lambda_star_exp(const ModelParams& params) {
  const NormalizedExp n = normalize(params);
  const double star = lambda_star_normalized(n);
  return star * n.gamma;
}

double r_u_exp(const ModelParams& params) {
  const NormalizedExp n = normalize(params);
  const double star = lambda_star_normalized(n);
  if (!(n.lambda < star)) return kInf;
  return r_u_normalized(n);
}

double ru_infinite_sufficiency_bound(const ModelParams& params, double epsilon) {
  params.validate();
  if (params.infectious.kind() != DistKind::Exponential) {
    throw InvalidConfig("sufficiency bound needs an Exponential infectious law");
  }
  if (!(epsilon > 0.0)) throw InvalidConfig("epsilon must be > 0");
  const double gamma = params.infectious.rate();
  const DiffLaw law{params.delay, params.latent};
  const double tail =
      trunc_expect(law, Integrand::one(), open_bound(epsilon), plus_infinity());
  if (!(tail > 0.0)) throw InvalidConfig("requires P(T_D > T_L + epsilon) > 0");
  const double ge = gamma * epsilon;
  const double lifetime_factor = 1.0 - std::exp(-ge) * (ge + 1.0);
  const double denom = params.p * params.pi_r / gamma * lifetime_factor * tail;
  return denom > 0.0 ? 1.0 / denom : kInf;
}

double lambda_crit(const ModelParams& params, CritCase which) {
  constexpr double kTol = 1e-6;
  constexpr double kFallbackHi = 1e3;

  if (which == CritCase::ConstR0 || which == CritCase::ConstRU) {
    // Every mean-matrix entry is proportional to lambda, so evaluate the
    // matrix once at lambda = 1 and rescale inside the bisection.
    const MeanMatrix unit = mean_matrix(params.with_lambda(1.0));
    const double star = lambda_star_const(params.with_lambda(1.0));
    auto value = [&unit, which](double lam) {
      const MeanMatrix m{lam * unit.m_uu, lam * unit.m_un, lam * unit.m_nu, lam * unit.m_nn};
      if (which == CritCase::ConstR0) {
        const double diff = m.m_uu - m.m_nn;
        return 0.5 * (m.m_uu + m.m_nn + std::sqrt(diff * diff + 4.0 * m.m_un * m.m_nu));
      }
      if (m.m_nn >= 1.0) return kInf;
      return m.m_uu + m.m_un * m.m_nu / (1.0 - m.m_nn);
    };
    const double hi =
        (which == CritCase::ConstRU && std::isfinite(star)) ? star - kTol : kFallbackHi;
    return bisect_unit_crossing(value, 1e-6, hi, kTol);
  }

  const NormalizedExp base = normalize(params);
  const double star = lambda_star_normalized(base);
  auto value = [&base, star](double lam) {
    NormalizedExp probe = base;
    probe.lambda = lam;
    if (!(lam < star)) return kInf;
    const double r = r_u_normalized(probe);
    // The series value diverges to +inf at the blow-up; a non-finite or
    // negative evaluation in the last sliver below it means the same side.
    if (!std::isfinite(r) || r < 0.0) return kInf;
    return r;
  };
  const double hi = std::isfinite(star) ? star - kTol : kFallbackHi;
  return bisect_unit_crossing(value, 1e-6, hi, kTol) * base.gamma;
}

ExpAnalysisResult analyze_exp(const ModelParams& params) {
  const NormalizedExp n = normalize(params);
  const double star = lambda_star_normalized(n);
  ExpAnalysisResult out;
  out.lambda_star = star * n.gamma;
  out.finite = n.lambda < star;
  out.y_star = y_star_normalized(n);
  out.r_u = out.finite ? r_u_normalized(n) : kInf;
  return out;
}

}  // namespace tracethresh
