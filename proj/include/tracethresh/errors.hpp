#pragma once

#include <stdexcept>
#include <string>

namespace tracethresh {

// Thrown for malformed or out-of-range parameters before any computation starts.
struct InvalidConfig : std::invalid_argument {
  explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

// Base class for failures of the numerical machinery itself.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergedQuadrature : NumericalError {
  explicit NonConvergedQuadrature(const std::string& what) : NumericalError(what) {}
};

struct NoConvergence : NumericalError {
  explicit NoConvergence(const std::string& what) : NumericalError(what) {}
};

struct NoBracket : NumericalError {
  explicit NoBracket(const std::string& what) : NumericalError(what) {}
};

// Final-size histogram has no interior valley separating minor and major
// outbreaks, so no automatic cutoff can be placed.
struct DegenerateHistogram : NumericalError {
  explicit DegenerateHistogram(const std::string& what) : NumericalError(what) {}
};

}  // namespace tracethresh
