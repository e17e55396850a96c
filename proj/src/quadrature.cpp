#include "bwsel/quadrature.hpp"
#include "bwsel/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace bwsel::quad {

namespace {
constexpr unsigned kMaxDepth = 18;
constexpr double kRelTol = 1e-11;
}

Result
integrate(const std::function<double(double)>& f,
          double a,
          double b,
          double abs_tol)
{
  if (!(b > a))
    return {};
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double error = 0.0;
  double l1 = 0.0;
  double value = GK::integrate(f, a, b, 0, 0.0, &error, &l1);
  // Kronrod error estimates are pessimistic near machine precision, so the
  // relative floor is taken against the L1 norm of the integrand.
  double target = std::max({ abs_tol, kRelTol * l1, 1e-15 });
  if (error > target && l1 > 0.0) {
    // Boost only knows a relative tolerance; express the absolute target in
    // those terms so tiny integrands do not bisect down to roundoff.
    const double rel = std::max(kRelTol, 0.5 * target / l1);
    value = GK::integrate(f, a, b, kMaxDepth, rel, &error, &l1);
    target = std::max({ abs_tol, kRelTol * l1, 1e-15 });
  }
  if (!std::isfinite(value) || error > target)
    throw QuadratureError(
      "adaptive quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
      error,
      target);
  return { value, error };
}

double
integrate_pieces(const std::function<double(double)>& f,
                 double a,
                 double b,
                 std::span<const double> breakpoints,
                 double abs_tol)
{
  if (!(b > a))
    return 0.0;
  std::vector<double> nodes{ a };
  for (double p : breakpoints) {
    if (p > a && p < b)
      nodes.push_back(p);
  }
  nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const double piece_tol = abs_tol / static_cast<double>(nodes.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    total += integrate(f, nodes[i], nodes[i + 1], piece_tol).value;
  return total;
}

double
trapezoid(const std::function<double(double)>& f, double a, double b, int points)
{
  if (points < 2)
    throw DomainError("trapezoid rule needs at least two nodes");
  const double step = (b - a) / (points - 1);
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < points - 1; ++i)
    sum += f(a + i * step);
  return sum * step;
}

} // namespace bwsel::quad
