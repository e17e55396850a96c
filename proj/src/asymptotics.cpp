#include "bwsel/asymptotics.hpp"
#include "bwsel/errors.hpp"
#include "bwsel/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace bwsel::asymptotics {

namespace {

constexpr double kInnerTolerance = 1e-10;
constexpr double kOuterTolerance = 1e-9;

// Points where a kernel or its derivative may jump.
std::vector<double>
kinks(const Kernel& k)
{
  const auto s = k.support();
  return { s.lo, 0.0, s.hi };
}

// int a(s + v) b(v) dv where a and b both vanish outside supp(k).
template<typename A, typename B>
double
shifted_product(const Kernel& k, double s, A a, B b)
{
  const auto sup = k.support();
  const double lo = std::max(sup.lo, sup.lo - s);
  const double hi = std::min(sup.hi, sup.hi - s);
  if (!(hi > lo))
    return 0.0;
  std::vector<double> breaks;
  for (double p : kinks(k)) {
    breaks.push_back(p);
    breaks.push_back(p - s);
  }
  return quad::integrate_pieces(
    [&](double v) { return a(s + v) * b(v); }, lo, hi, breaks, kInnerTolerance);
}

double
half_width(const Kernel& k)
{
  const auto s = k.support();
  return std::max(-s.lo, s.hi);
}

// int [f(u)]^2 du over [-bound, bound] split at the given points.
double
outer_integral(const std::function<double(double)>& f,
               double bound,
               const std::vector<double>& breaks)
{
  return quad::integrate_pieces(
    [&](double u) {
      const double v = f(u);
      return v * v;
    },
    -bound,
    bound,
    breaks,
    kOuterTolerance);
}

std::vector<double>
scaled_breaks(double scale, double hw)
{
  std::vector<double> out;
  for (double m : { -2.0, -1.0, 0.0, 1.0, 2.0 })
    out.push_back(scale * m * hw);
  return out;
}

} // namespace

std::string
to_string(Family f)
{
  switch (f) {
    case Family::cv:
      return "CV";
    case Family::icv:
      return "ICV";
    case Family::do_validation:
      return "DO";
    case Family::ido:
      return "IDO";
    case Family::plugin:
      return "PI";
  }
  return "?";
}

std::string
VarianceConstant::indirect_label() const
{
  if (!indirect)
    return "-";
  if (indirect->family() == KernelFamily::gaussian)
    return "G";
  return std::to_string(indirect->order());
}

double
h_function(const Kernel& k, double u)
{
  // v in supp(k) and u - v in supp(k); a(x) = k(-x) turns k(u - v) into a(v - u)
  return 4.0 * shifted_product(
                 k,
                 -u,
                 [&](double x) { return k(-x); },
                 [&](double v) { return k(v) + v * k.derivative(v); });
}

double
d_factor(const Kernel& target, const Kernel& l)
{
  return 1.0 / rescale_factor(target, l);
}

double
h_icv_function(const Kernel& target, const Kernel& l, double w)
{
  const double u = w / d_factor(target, l);
  return h_function(l, u) - 4.0 * (l(u) + u * l.derivative(u));
}

double
h_onesided_rhs(const Kernel& kl, double u)
{
  const auto value = [&](double x) { return kl(x); };
  const auto weighted_deriv = [&](double v) { return v * kl.derivative(v); };
  double out = 2.0 * shifted_product(kl, u, value, value) +
               2.0 * shifted_product(kl, -u, value, value) +
               2.0 * shifted_product(kl, u, value, weighted_deriv) +
               2.0 * shifted_product(kl, -u, value, weighted_deriv);
  out -= 2.0 * (kl(u) + u * kl.derivative(u) + kl(-u) - u * kl.derivative(-u));
  return out;
}

double
h_do_function(const Kernel& target, double w)
{
  const Kernel kl = onesided_equivalent(target, Side::left);
  return h_onesided_rhs(kl, w / d_factor(target, kl));
}

double
h_ido_function(const Kernel& target, const Kernel& indirect, double w)
{
  const Kernel kl = onesided_equivalent(indirect, Side::left);
  return h_onesided_rhs(kl, w / d_factor(target, kl));
}

double
variance_integral(Family family, const Kernel& target, const std::optional<Kernel>& indirect)
{
  if (!target.symmetric())
    throw DomainError("asymptotic constants need a symmetric target kernel");
  const double hw_target = half_width(target);
  const auto h = [&](double u) { return h_function(target, u); };
  std::vector<double> breaks = scaled_breaks(1.0, hw_target);

  if (family == Family::plugin)
    return outer_integral(h, 2.0 * hw_target, breaks);

  Kernel l = target;
  switch (family) {
    case Family::cv:
      break;
    case Family::icv:
      if (!indirect)
        throw DomainError("ICV constant needs an indirect kernel");
      l = *indirect;
      break;
    case Family::do_validation:
      l = onesided_equivalent(target, Side::left);
      break;
    case Family::ido:
      if (!indirect)
        throw DomainError("IDO constant needs an indirect kernel");
      l = onesided_equivalent(*indirect, Side::left);
      break;
    case Family::plugin:
      break;
  }

  const double d = d_factor(target, l);
  const double ratio = target.functionals().R / l.functionals().R;
  const double hw_l = half_width(l);
  const auto scaled = scaled_breaks(d, hw_l);
  breaks.insert(breaks.end(), scaled.begin(), scaled.end());
  const double bound = std::max(2.0 * hw_target, 2.0 * d * hw_l);

  const bool onesided = family == Family::do_validation || family == Family::ido;
  const auto g = [&](double w) {
    const double u = w / d;
    const double fam = onesided ? h_onesided_rhs(l, u)
                                : h_function(l, u) - 4.0 * (l(u) + u * l.derivative(u));
    return h(w) - ratio * fam;
  };
  return outer_integral(g, bound, breaks);
}

double
normalization(Normalization mode, const Kernel& target)
{
  if (mode == Normalization::analytic)
    return kAnalyticAlpha;
  return kCvAnchor / variance_integral(Family::cv, target);
}

VarianceConstant
variance_constant(Family family,
                  const Kernel& target,
                  const std::optional<Kernel>& indirect,
                  Normalization mode)
{
  VarianceConstant c;
  c.family = family;
  if (family == Family::icv || family == Family::ido)
    c.indirect = indirect;
  c.integral = variance_integral(family, target, indirect);
  c.normalization = normalization(mode, target);
  c.value = c.normalization * c.integral;
  return c;
}

std::vector<VarianceConstant>
constant_table(const Kernel& target, int max_order, Normalization mode)
{
  if (max_order < 2)
    throw DomainError("max order must be at least 2");
  const double alpha = normalization(mode, target);
  std::vector<VarianceConstant> rows;
  const auto add = [&](Family f, std::optional<Kernel> l) {
    VarianceConstant c;
    c.family = f;
    c.indirect = l;
    c.integral = variance_integral(f, target, l);
    c.normalization = alpha;
    c.value = alpha * c.integral;
    rows.push_back(std::move(c));
  };
  add(Family::cv, std::nullopt);
  for (int r = 2; r <= max_order; ++r)
    add(Family::icv, Kernel::polynomial(r));
  add(Family::icv, Kernel::gaussian());
  add(Family::do_validation, std::nullopt);
  for (int r = 2; r <= max_order; ++r)
    add(Family::ido, Kernel::polynomial(r));
  add(Family::ido, Kernel::gaussian());
  add(Family::plugin, std::nullopt);
  return rows;
}

HFunctionTable
tabulate(HKind kind, const Kernel& target, const Kernel& kernel, std::span<const double> grid)
{
  HFunctionTable t;
  t.kind = kind;
  t.grid.assign(grid.begin(), grid.end());
  t.values.reserve(grid.size());
  switch (kind) {
    case HKind::h:
      t.d_factor = 1.0;
      for (double w : grid)
        t.values.push_back(h_function(target, w));
      break;
    case HKind::icv:
      t.d_factor = d_factor(target, kernel);
      for (double w : grid)
        t.values.push_back(h_icv_function(target, kernel, w));
      break;
    case HKind::do_star:
      t.d_factor = d_factor(target, onesided_equivalent(target, Side::left));
      for (double w : grid)
        t.values.push_back(h_do_function(target, w));
      break;
    case HKind::ido:
      t.d_factor = d_factor(target, onesided_equivalent(kernel, Side::left));
      for (double w : grid)
        t.values.push_back(h_ido_function(target, kernel, w));
      break;
  }
  return t;
}

} // namespace bwsel::asymptotics
