#include "tracethresh/quadrature.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "tracethresh/errors.hpp"

namespace tracethresh {
namespace {

// 15-point Kronrod nodes on [0,1] half-interval with the embedded 7-point
// Gauss rule (QUADPACK dqk15 constants).
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

struct Panel {
  double lo, hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double offset = half * kNodes[i];
    double fsum = finite_or_zero(f(center - offset));
    if (i < 7) fsum += finite_or_zero(f(center + offset));
    kronrod += kKronrodW[i] * fsum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return Panel{lo, hi, kronrod, std::abs(kronrod - gauss)};
}

double adaptive(const std::function<double(double)>& f, double lo, double hi,
                const QuadOptions& opt) {
  std::priority_queue<Panel> panels;
  panels.push(evaluate_panel(f, lo, hi));
  double total = panels.top().value;
  double total_err = panels.top().error;
  // Roundoff floor: when the integrand cancels internally, the error
  // estimate cannot drop below the rounding noise of the absolute mass.
  double total_abs = std::abs(total);
  constexpr double kNoiseFactor = 50.0 * std::numeric_limits<double>::epsilon();
  int used = 1;
  while (total_err >
         std::max({opt.rel_tol * std::abs(total), opt.abs_tol, kNoiseFactor * total_abs})) {
    if (used >= opt.max_panels) {
      throw NonConvergedQuadrature("adaptive quadrature: panel budget exhausted");
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      // Interval width at rounding limit; accept its estimate as-is.
      total_err -= worst.error;
      worst.error = 0.0;
      panels.push(worst);
      continue;
    }
    const Panel left = evaluate_panel(f, worst.lo, mid);
    const Panel right = evaluate_panel(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
    panels.push(left);
    panels.push(right);
    ++used;
  }
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadOptions& opt) {
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (!lo_inf && !hi_inf) {
    if (!(lo < hi)) return 0.0;
    return adaptive(f, lo, hi, opt);
  }
  if (lo_inf && hi_inf) {
    // x = t/(1-t^2) maps (-1,1) onto the whole line.
    auto g = [&f](double t) {
      const double denom = 1.0 - t * t;
      const double x = t / denom;
      const double jac = (1.0 + t * t) / (denom * denom);
      return f(x) * jac;
    };
    return adaptive(g, -1.0, 1.0, opt);
  }
  if (hi_inf) {
    // x = lo + t/(1-t) maps [0,1) onto [lo, inf).
    auto g = [&f, lo](double t) {
      const double denom = 1.0 - t;
      const double x = lo + t / denom;
      return f(x) / (denom * denom);
    };
    return adaptive(g, 0.0, 1.0, opt);
  }
  // x = hi - t/(1-t) maps [0,1) onto (-inf, hi].
  auto g = [&f, hi](double t) {
    const double denom = 1.0 - t;
    const double x = hi - t / denom;
    return f(x) / (denom * denom);
  };
  return adaptive(g, 0.0, 1.0, opt);
}

}  // namespace tracethresh
