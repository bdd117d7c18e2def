#pragma once

#include <functional>

namespace tracethresh {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_panels = 10000;
};

// Globally adaptive Gauss-Kronrod (7,15) integration of f over (lo, hi).
// Either endpoint may be infinite; infinite ranges are mapped to [0,1)
// with a rational substitution before subdividing. Non-finite integrand
// values are treated as zero (they only arise where a density underflows).
// Throws NonConvergedQuadrature when the panel budget is exhausted before
// the error estimate meets max(rel_tol * |result|, abs_tol).
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadOptions& opt = {});

}  // namespace tracethresh
