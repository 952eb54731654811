#pragma once

#include <stdexcept>
#include <string>

#include "softplast/tensor.hpp"

namespace softplast {

// Construction-time or input-file constraint violation. The message names
// the offending quantity and the violated invariant.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver gave up; carries the last iterate and its residual.
struct SolverFailure : std::runtime_error {
  DevTensor2 last_iterate;
  double residual = 0.0;
  int iterations = 0;
  int time_index = -1;  // filled by the time loop when known

  SolverFailure(const std::string& what, DevTensor2 iterate, double res, int iters)
      : std::runtime_error(what),
        last_iterate(iterate),
        residual(res),
        iterations(iters) {}
};

}  // namespace softplast
