#include "rangevol/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rangevol {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> step,
                             const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto along = [&](std::vector<double>& out, double t) {
    const auto& worst = simplex[order[n]];
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // stable: ties resolved by vertex index, keeps runs reproducible
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const double f_best = fx[order[0]];
    const double f_worst = fx[order[n]];
    if (std::isfinite(f_worst) && f_worst - f_best <= options.ftol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iterations) break;
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    const double f_second = fx[order[n - 1]];
    along(xr, options.reflect);
    const double fr = eval(xr);
    if (fr < f_best) {
      along(xe, options.reflect * options.expand);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[order[n]] = xe;
        fx[order[n]] = fe;
      } else {
        simplex[order[n]] = xr;
        fx[order[n]] = fr;
      }
      continue;
    }
    if (fr < f_second) {
      simplex[order[n]] = xr;
      fx[order[n]] = fr;
      continue;
    }
    // contraction: outside if the reflected point beat the worst vertex
    const bool outside = fr < f_worst;
    along(xc, outside ? options.reflect * options.contract : -options.contract);
    const double fc = eval(xc);
    if (fc < (outside ? fr : f_worst)) {
      simplex[order[n]] = xc;
      fx[order[n]] = fc;
      continue;
    }
    const auto& best = simplex[order[0]];
    for (std::size_t i = 1; i <= n; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < n; ++j) v[j] = best[j] + options.shrink * (v[j] - best[j]);
      fx[order[i]] = eval(v);
    }
  }

  result.x = simplex[order[0]];
  result.f = fx[order[0]];
  return result;
}

}  // namespace rangevol
