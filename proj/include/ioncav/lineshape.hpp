#pragma once

// Cavity-detuning scans, peak detection and lineshape fitting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ioncav/errors.hpp"
#include "ioncav/optimize.hpp"
#include "ioncav/parallel.hpp"
#include "ioncav/steadystate.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

struct LineshapeRow {
  double delta_c = 0.0;  // rad/s
  double n_h = 0.0;
  double n_v = 0.0;
  double count_rate = 0.0;  // 1/s
};

using LineshapeTable = std::vector<LineshapeRow>;

/// `points` evenly spaced values from start to stop inclusive.
inline std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 1) throw DomainError("grid needs at least one point");
  if (points == 1) return {start};
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = (stop - start) / (points - 1);
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = start + step * k;
  g.back() = stop;
  return g;
}

namespace detail {

inline void require_increasing(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("scan grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw DomainError("scan grid has a non-finite value");
    if (k > 0 && !(grid[k] > grid[k - 1]))
      throw DomainError("scan grid must be strictly increasing");
  }
}

}  // namespace detail

/// One steady-state solve per detuning (rad/s). Solver errors are rethrown
/// with the offending detuning in the message.
inline LineshapeTable scan(const SystemParams& params, const std::vector<double>& grid,
                           unsigned workers = 1) {
  detail::require_increasing(grid);
  params.validate();
  LineshapeTable table(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t k) {
    SystemParams p = params;
    p.cavity.delta_c = grid[k];
    try {
      const SteadyStateResult r = solve_system(p);
      table[k] = {grid[k], r.n_h, r.n_v, r.count_rate};
    } catch (const Error& e) {
      rethrow_with_context(e, "at delta_c = " + std::to_string(units::linear(grid[k])) + " Hz");
    }
  });
  return table;
}

struct Peak {
  double delta_c = 0.0;
  double height = 0.0;
  std::size_t index = 0;
};

/// Centered moving average; width 1 returns the input. Windows shrink
/// symmetrically at the ends.
inline std::vector<double> boxcar(const std::vector<double>& y, int width) {
  if (width < 1 || width % 2 == 0) throw DomainError("smoothing width must be a positive odd number");
  if (width == 1) return y;
  const auto n = static_cast<long>(y.size());
  const long half = width / 2;
  std::vector<double> out(y.size());
  for (long k = 0; k < n; ++k) {
    const long h = std::min({half, k, n - 1 - k});
    double s = 0.0;
    for (long j = k - h; j <= k + h; ++j) s += y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(k)] = s / static_cast<double>(2 * h + 1);
  }
  return out;
}

/// Interior local maxima of count_rate: y[k-1] < y[k] >= y[k+1]. Heights are
/// the unsmoothed values.
inline std::vector<Peak> find_peaks(const LineshapeTable& t, int smoothing = 1) {
  if (t.size() < 3) throw DomainError("peak search needs at least 3 rows, got " + std::to_string(t.size()));
  std::vector<double> y(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) y[k] = t[k].count_rate;
  const std::vector<double> s = boxcar(y, smoothing);
  std::vector<Peak> peaks;
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (s[k] > s[k - 1] && s[k] >= s[k + 1]) peaks.push_back({t[k].delta_c, y[k], k});
  return peaks;
}

/// Excited population of a driven two-level atom.
inline double bloch_two_level(double omega, double delta, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  const double o2 = omega * omega;
  if (std::isinf(o2)) return 0.5;
  return 0.25 * o2 / (delta * delta + 0.25 * gamma * gamma + 0.5 * o2);
}

/// Height of the side peaks above the dip separating them from the central
/// (tallest) peak, averaged over the sides that have one. Zero without side
/// peaks.
inline double sideband_prominence(const LineshapeTable& t, const std::vector<Peak>& peaks) {
  if (peaks.size() < 2) return 0.0;
  const auto central = std::max_element(peaks.begin(), peaks.end(),
                                        [](const Peak& a, const Peak& b) { return a.height < b.height; });
  auto side = [&](auto first, auto last) -> std::optional<double> {
    std::optional<Peak> best;
    for (auto it = first; it != last; ++it)
      if (!best || it->height > best->height) best = *it;
    if (!best) return std::nullopt;
    const std::size_t lo = std::min(best->index, central->index);
    const std::size_t hi = std::max(best->index, central->index);
    double dip = std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k <= hi; ++k) dip = std::min(dip, t[k].count_rate);
    return best->height - dip;
  };
  const auto left = side(peaks.begin(), central);
  const auto right = side(central + 1, peaks.end());
  double sum = 0.0;
  int count = 0;
  for (const auto& v : {left, right})
    if (v) {
      sum += *v;
      ++count;
    }
  return count ? sum / count : 0.0;
}

struct LorentzianFit {
  double center = 0.0;
  double hwhm = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double r_squared = 0.0;

  double operator()(double x) const {
    const double u = (x - center) / hwhm;
    return offset + amplitude / (1.0 + u * u);
  }
};

namespace detail {

/// Best amplitude and offset for a fixed Lorentzian shape; returns SSE.
inline double lorentz_linear_part(const std::vector<double>& x, const std::vector<double>& y,
                                  double center, double hwhm, double& amp, double& off) {
  double s11 = 0.0, s1 = 0.0, sy1 = 0.0, sy = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double u = (x[k] - center) / hwhm;
    const double b = 1.0 / (1.0 + u * u);
    s11 += b * b;
    s1 += b;
    sy1 += y[k] * b;
    sy += y[k];
  }
  const double det = s11 * n - s1 * s1;
  if (std::abs(det) < 1e-300) {
    amp = 0.0;
    off = sy / n;
  } else {
    amp = (sy1 * n - s1 * sy) / det;
    off = (s11 * sy - s1 * sy1) / det;
  }
  double sse = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double u = (x[k] - center) / hwhm;
    const double r = y[k] - off - amp / (1.0 + u * u);
    sse += r * r;
  }
  return sse;
}

}  // namespace detail

/// Least-squares Lorentzian plus constant. Center and width are found by a
/// simplex search; amplitude and offset are solved linearly at each probe.
inline LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) throw DomainError("Lorentzian fit needs >= 4 points");
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const double span = *xmax - *xmin;
  if (!(span > 0.0)) throw DomainError("Lorentzian fit needs distinct abscissae");
  const std::size_t kmax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());

  // Normalized coordinates: center in units of span, log width.
  auto objective = [&](const std::vector<double>& v) {
    double a = 0.0, o = 0.0;
    return detail::lorentz_linear_part(x, y, *xmin + v[0] * span, span * std::exp(v[1]), a, o);
  };
  Box box{{-0.5, std::log(1e-4)}, {1.5, std::log(10.0)}};
  SimplexOptions opt;
  opt.max_iterations = 2000;
  opt.size_tolerance = 1e-10;
  opt.relative_tolerance = 1e-12;
  opt.restarts = 2;
  const SimplexResult r = minimize_simplex(
      objective, box, {(x[kmax] - *xmin) / span, std::log(0.1)}, {0.05, 0.5}, opt);

  LorentzianFit fit;
  fit.center = *xmin + r.x[0] * span;
  fit.hwhm = span * std::exp(r.x[1]);
  const double sse = detail::lorentz_linear_part(x, y, fit.center, fit.hwhm, fit.amplitude, fit.offset);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);
  fit.r_squared = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
  return fit;
}

/// Search ranges for fit_geometry. Angles in radians.
struct GeometryBounds {
  double i_rel_min = 0.0, i_rel_max = 0.0;
  double theta_min = 0.0, theta_max = 0.0;
  double psi_min = 0.0, psi_max = 0.0;
  double scale_min = 0.0, scale_max = 0.0;

  void validate() const {
    const double pairs[][2] = {{i_rel_min, i_rel_max}, {theta_min, theta_max},
                               {psi_min, psi_max}, {scale_min, scale_max}};
    for (const auto& p : pairs)
      if (!(std::isfinite(p[0]) && std::isfinite(p[1]) && p[0] <= p[1]))
        throw DomainError("geometry-fit bounds must be finite and ordered");
    if (i_rel_min < 0.0) throw DomainError("intensity bound must be >= 0");
    if (theta_min < 0.0 || theta_max > units::pi) throw DomainError("theta bounds must lie in [0, pi]");
    if (psi_min < 0.0 || psi_max >= units::pi) throw DomainError("psi bounds must lie in [0, pi)");
    if (scale_min < 0.0) throw DomainError("amplitude scale bound must be >= 0");
  }
};

struct GeometryFitOptions {
  int grid_i_rel = 4;
  int grid_theta = 4;
  int grid_psi = 4;
  int max_iterations = 200;
  double size_tolerance = 1e-3;  // in units of the bound widths
  double relative_tolerance = 1e-6;
  int restarts = 1;
  unsigned workers = 1;
  std::ostream* log = nullptr;  // failed probes are reported here when set
};

struct GeometryFit {
  double i_rel = 0.0;
  DriveGeometry geometry;
  double scale = 0.0;
  double sse = 0.0;
  double grid_sse = 0.0;
  int evaluations = 0;
  int failed_probes = 0;
  int iterations = 0;
};

namespace detail {

struct ProbeResult {
  double sse = std::numeric_limits<double>::infinity();
  double scale = 0.0;
};

/// SSE between scale * model and data with the scale solved in closed form
/// and clamped to its bounds.
inline ProbeResult geometry_probe(const SystemParams& base, const LineshapeTable& data,
                                  double i_rel, double theta, double psi, const GeometryBounds& b) {
  SystemParams p = base;
  p.i_rel = i_rel;
  p.geometry = {theta, psi};
  std::vector<double> grid(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) grid[k] = data[k].delta_c;
  const LineshapeTable model = scan(p, grid);
  double mm = 0.0, my = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    mm += model[k].count_rate * model[k].count_rate;
    my += model[k].count_rate * data[k].count_rate;
  }
  ProbeResult r;
  r.scale = std::clamp(mm > 0.0 ? my / mm : b.scale_min, b.scale_min, b.scale_max);
  r.sse = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double d = r.scale * model[k].count_rate - data[k].count_rate;
    r.sse += d * d;
  }
  return r;
}

inline std::vector<double> grid_axis(double lo, double hi, int n) {
  if (n <= 1 || lo == hi) return {0.5 * (lo + hi)};
  return linear_grid(lo, hi, n);
}

}  // namespace detail

/// Fit drive intensity, pump angles and an overall amplitude scale to a
/// measured lineshape. Everything except those is taken from `base`.
///
/// A coarse grid over (i_rel, theta, psi) picks the start of a simplex
/// refinement. The amplitude scale is eliminated analytically at every
/// probe. Probes whose solve fails score +inf and are logged.
inline GeometryFit fit_geometry(const SystemParams& base, const LineshapeTable& data,
                                const GeometryBounds& bounds, const GeometryFitOptions& opt = {}) {
  if (data.empty()) throw DomainError("no data to fit");
  bounds.validate();
  base.cavity.validate();

  GeometryFit out;
  int failures = 0;
  auto probe = [&](double i_rel, double theta, double psi) {
    try {
      return detail::geometry_probe(base, data, i_rel, theta, psi, bounds);
    } catch (const Error& e) {
      ++failures;
      if (opt.log) *opt.log << "fit_geometry: probe failed: " << e.what() << '\n';
      return detail::ProbeResult{};
    }
  };

  const auto gi = detail::grid_axis(bounds.i_rel_min, bounds.i_rel_max, opt.grid_i_rel);
  const auto gt = detail::grid_axis(bounds.theta_min, bounds.theta_max, opt.grid_theta);
  const auto gp = detail::grid_axis(bounds.psi_min, bounds.psi_max, opt.grid_psi);
  const std::size_t total = gi.size() * gt.size() * gp.size();
  std::vector<detail::ProbeResult> grid_results(total);
  std::vector<int> grid_failed(total, 0);
  parallel_for(total, opt.workers, [&](std::size_t idx) {
    const std::size_t a = idx / (gt.size() * gp.size());
    const std::size_t b = (idx / gp.size()) % gt.size();
    const std::size_t c = idx % gp.size();
    try {
      grid_results[idx] = detail::geometry_probe(base, data, gi[a], gt[b], gp[c], bounds);
    } catch (const Error&) {
      grid_failed[idx] = 1;
    }
  });
  std::size_t best = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (grid_failed[idx]) {
      ++failures;
      if (opt.log) *opt.log << "fit_geometry: grid probe " << idx << " failed\n";
    }
    if (grid_results[idx].sse < grid_results[best].sse) best = idx;
  }
  out.evaluations = static_cast<int>(total);
  out.grid_sse = grid_results[best].sse;
  const std::vector<double> start{gi[best / (gt.size() * gp.size())],
                                  gt[(best / gp.size()) % gt.size()], gp[best % gp.size()]};

  // Simplex in coordinates normalized by the bound widths.
  const double wi = std::max(bounds.i_rel_max - bounds.i_rel_min, 1e-12);
  const double wt = std::max(bounds.theta_max - bounds.theta_min, 1e-12);
  const double wp = std::max(bounds.psi_max - bounds.psi_min, 1e-12);
  auto to_phys = [&](const std::vector<double>& u) {
    return std::vector<double>{bounds.i_rel_min + u[0] * wi, bounds.theta_min + u[1] * wt,
                               bounds.psi_min + u[2] * wp};
  };
  auto objective = [&](const std::vector<double>& u) {
    ++out.evaluations;
    const auto v = to_phys(u);
    return probe(v[0], v[1], v[2]).sse;
  };
  const Box unit{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  const std::vector<double> u0{(start[0] - bounds.i_rel_min) / wi, (start[1] - bounds.theta_min) / wt,
                               (start[2] - bounds.psi_min) / wp};
  const std::vector<double> step{0.5 / std::max(1, opt.grid_i_rel - 1),
                                 0.5 / std::max(1, opt.grid_theta - 1),
                                 0.5 / std::max(1, opt.grid_psi - 1)};
  SimplexOptions sopt;
  sopt.max_iterations = opt.max_iterations;
  sopt.size_tolerance = opt.size_tolerance;
  sopt.relative_tolerance = opt.relative_tolerance;
  sopt.restarts = opt.restarts;
  double signal = 0.0;
  for (const auto& r : data) signal += r.count_rate * r.count_rate;
  sopt.absolute_floor = 1e-14 * signal;
  const SimplexResult sr = minimize_simplex(objective, unit, u0, step, sopt);

  std::vector<double> best_x = to_phys(sr.x);
  detail::ProbeResult final_probe = probe(best_x[0], best_x[1], best_x[2]);
  if (!(final_probe.sse <= out.grid_sse)) {
    best_x = start;
    final_probe = grid_results[best];
  }
  out.i_rel = best_x[0];
  out.geometry = {best_x[1], best_x[2]};
  out.scale = final_probe.scale;
  out.sse = final_probe.sse;
  out.iterations = sr.iterations;
  out.failed_probes = failures;
  return out;
}

}  // namespace ioncav
