#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rangevol {

struct NelderMeadOptions {
  double ftol = 1e-7;        // stop when max f - min f over the simplex <= ftol
  int max_iterations = 5000;
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes `f` starting from an axis-aligned simplex around `x0` with
/// per-coordinate offsets `step`. Non-finite objective values are treated
/// as +infinity, so infeasible points simply lose every comparison.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> step,
                             const NelderMeadOptions& options = {});

}  // namespace rangevol
