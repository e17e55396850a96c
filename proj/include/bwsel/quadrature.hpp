#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace bwsel::quad {

//! Default absolute tolerance for kernel functionals and H-integrals.
inline constexpr double kDefaultTolerance = 1e-10;

struct Result
{
  double value = 0.0;
  double error = 0.0;
};

//! Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
//!
//! Converged when the error estimate is below max(abs_tol, 1e-12 * |I|).
//! Throws QuadratureError carrying the achieved error otherwise.
Result
integrate(const std::function<double(double)>& f,
          double a,
          double b,
          double abs_tol = kDefaultTolerance);

//! As integrate(), but splits [a, b] at the given interior breakpoints
//! (kinks or jumps of the integrand). Breakpoints outside (a, b) are ignored.
double
integrate_pieces(const std::function<double(double)>& f,
                 double a,
                 double b,
                 std::span<const double> breakpoints,
                 double abs_tol = kDefaultTolerance);

inline double
integrate_pieces(const std::function<double(double)>& f,
                 double a,
                 double b,
                 std::initializer_list<double> breakpoints,
                 double abs_tol = kDefaultTolerance)
{
  std::vector<double> b_(breakpoints);
  return integrate_pieces(f, a, b, b_, abs_tol);
}

//! Composite trapezoid rule on an equispaced grid with `points` nodes.
double
trapezoid(const std::function<double(double)>& f, double a, double b, int points);

} // namespace bwsel::quad
