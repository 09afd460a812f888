#pragma once

// Derivative-free minimization (GSL Nelder-Mead) with box bounds.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ioncav/errors.hpp"

namespace ioncav {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const noexcept { return lower.size(); }

  void validate() const {
    if (lower.empty() || lower.size() != upper.size())
      throw DomainError("bounds must be nonempty with matching lower/upper sizes");
    for (std::size_t i = 0; i < lower.size(); ++i)
      if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] <= upper[i]))
        throw DomainError("bound " + std::to_string(i) + " is not well ordered");
  }

  std::vector<double> clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  }
};

struct SimplexOptions {
  int max_iterations = 200;          // per run, restarts included separately
  double size_tolerance = 1e-6;      // simplex size (mean vertex distance to centroid)
  double relative_tolerance = 1e-6;  // on the best objective value, see stall_window
  int stall_window = 0;              // iterations without relative progress; 0 means 10 (n + 1)
  double absolute_floor = 0.0;       // stop once the objective drops below this
  int restarts = 0;                  // fresh simplices started at the previous optimum
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct SimplexClosure {
  const std::function<double(const std::vector<double>&)>* f;
  const Box* box;
  std::vector<double> scratch;
};

// GSL's simplex arithmetic breaks on infinities, so failed points are
// reported as the largest finite double.
inline double simplex_trampoline(const gsl_vector* v, void* params) {
  auto* c = static_cast<SimplexClosure*>(params);
  for (std::size_t i = 0; i < c->scratch.size(); ++i) c->scratch[i] = gsl_vector_get(v, i);
  const double y = (*c->f)(c->box->clamp(c->scratch));
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace detail

namespace detail {

inline SimplexResult simplex_run(gsl_multimin_function& fn, const Box& box, const std::vector<double>& x0,
                                 const std::vector<double>& step, const SimplexOptions& opt) {
  const std::size_t n = box.size();
  std::unique_ptr<gsl_vector, GslVectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, GslVectorDeleter> ss(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(ss.get(), i, step[i] > 0.0 ? step[i] : 1e-3);
  }
  std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  if (gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get()) != GSL_SUCCESS)
    throw SolverError("simplex initialization failed");

  SimplexResult out;
  const std::size_t window =
      opt.stall_window > 0 ? static_cast<std::size_t>(opt.stall_window) : 10 * (n + 1);
  std::vector<double> history{s->fval};
  for (out.iterations = 0; out.iterations < opt.max_iterations;) {
    const int status = gsl_multimin_fminimizer_iterate(s.get());
    ++out.iterations;
    history.push_back(s->fval);
    if (status != GSL_SUCCESS) break;
    if (s->fval <= opt.absolute_floor || gsl_multimin_fminimizer_size(s.get()) < opt.size_tolerance) {
      out.converged = true;
      break;
    }
    if (history.size() > window) {
      const double before = history[history.size() - window - 1];
      if (before - s->fval <= opt.relative_tolerance * std::abs(s->fval)) {
        out.converged = true;
        break;
      }
    }
  }
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
  out.x = box.clamp(std::move(out.x));
  out.value = s->fval;
  return out;
}

}  // namespace detail

/// Minimize f over `box` starting at x0 with initial per-coordinate steps.
/// Points proposed outside the box are clamped onto it before evaluation.
/// A run stops when the simplex has shrunk below size_tolerance, when the
/// best value stalls for stall_window iterations, or at max_iterations.
/// Each restart rebuilds the simplex around the current optimum with the
/// original steps, which guards against premature collapse.
inline SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                                      const Box& box, std::vector<double> x0,
                                      const std::vector<double>& step,
                                      const SimplexOptions& opt = {}) {
  box.validate();
  const std::size_t n = box.size();
  if (x0.size() != n || step.size() != n) throw DomainError("simplex start has wrong dimension");
  if (opt.restarts < 0) throw DomainError("simplex restarts must be >= 0");
  x0 = box.clamp(std::move(x0));

  gsl_set_error_handler_off();
  detail::SimplexClosure closure{&f, &box, std::vector<double>(n)};
  gsl_multimin_function fn{&detail::simplex_trampoline, n, &closure};

  SimplexResult best = detail::simplex_run(fn, box, x0, step, opt);
  for (int r = 0; r < opt.restarts && best.value > opt.absolute_floor; ++r) {
    SimplexResult next = detail::simplex_run(fn, box, best.x, step, opt);
    next.iterations += best.iterations;
    const bool improved = next.value < best.value;
    const bool settled = !(best.value - next.value > opt.relative_tolerance * std::abs(next.value));
    if (improved) best = std::move(next);
    else best.iterations = next.iterations;
    if (settled) break;
  }
  if (best.value == std::numeric_limits<double>::max()) best.value = std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace ioncav
