#include "bwsel/kernels.hpp"
#include "bwsel/errors.hpp"
#include "bwsel/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace bwsel {

namespace {

constexpr double kGaussianCutoff = 12.0;
constexpr int kTableNodes = 4096;
constexpr double kFunctionalTolerance = 1e-11;
constexpr double kTableTolerance = 1e-10;

double
ipow(double x, int r)
{
  double out = 1.0;
  for (; r > 0; --r)
    out *= x;
  return out;
}

double
phi(double u)
{
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

namespace detail {

struct KernelData
{
  KernelFamily family = KernelFamily::polynomial;
  int order = 0;
  std::optional<Side> side;
  double kappa = 0.0; // polynomial normalizer

  // one-sided: K_L(u) = (a + b u) 2 K(u) on u < 0
  double a = 0.0;
  double b = 0.0;
  std::shared_ptr<const KernelData> base;

  Interval support{ 0.0, 0.0 };
  KernelFunctionals functionals;

  std::vector<double> table; // autocorrelation on [0, support.width()]
  double table_step = 0.0;

  double symmetric_value(double u) const
  {
    if (family == KernelFamily::gaussian)
      return std::abs(u) >= kGaussianCutoff ? 0.0 : phi(u);
    if (u <= -1.0 || u >= 1.0)
      return 0.0;
    return kappa * ipow((1.0 - u) * (1.0 + u), order);
  }

  double symmetric_derivative(double u) const
  {
    if (family == KernelFamily::gaussian)
      return std::abs(u) >= kGaussianCutoff ? 0.0 : -u * phi(u);
    if (u < -1.0 || u > 1.0)
      return 0.0;
    return -2.0 * u * kappa * order * ipow((1.0 - u) * (1.0 + u), order - 1);
  }

  double value(double u) const
  {
    if (!side)
      return symmetric_value(u);
    if (*side == Side::left)
      return u < 0.0 ? (a + b * u) * 2.0 * base->symmetric_value(u) : 0.0;
    return u > 0.0 ? (a - b * u) * 2.0 * base->symmetric_value(u) : 0.0;
  }

  double derivative(double u) const
  {
    if (!side)
      return symmetric_derivative(u);
    if (*side == Side::left) {
      if (u >= 0.0)
        return 0.0;
      return 2.0 * (b * base->symmetric_value(u) +
                    (a + b * u) * base->symmetric_derivative(u));
    }
    if (u <= 0.0)
      return 0.0;
    return 2.0 * (-b * base->symmetric_value(u) +
                  (a - b * u) * base->symmetric_derivative(u));
  }

  double autocorrelation(double d) const
  {
    d = std::abs(d);
    if (!side && family == KernelFamily::gaussian)
      return std::exp(-0.25 * d * d) / (2.0 * std::sqrt(std::numbers::pi));
    const double width = support.width();
    if (d >= width)
      return 0.0;
    // 4-point Lagrange interpolation on the uniform table.
    const double x = d / table_step;
    int i0 = static_cast<int>(x) - 1;
    i0 = std::clamp(i0, 0, kTableNodes - 4);
    const double t = x - i0;
    const double* y = table.data() + i0;
    const double t1 = t - 1.0, t2 = t - 2.0, t3 = t - 3.0;
    return -y[0] * t1 * t2 * t3 / 6.0 + y[1] * t * t2 * t3 / 2.0 -
           y[2] * t * t1 * t3 / 2.0 + y[3] * t * t1 * t2 / 6.0;
  }

  std::vector<double> kinks() const
  {
    std::vector<double> out{ support.lo, support.hi };
    if (side)
      out.push_back(0.0);
    return out;
  }

  double integrate(const std::function<double(double)>& f) const
  {
    return quad::integrate_pieces(f, support.lo, support.hi, kinks(), kFunctionalTolerance);
  }

  void build_table()
  {
    table.resize(kTableNodes);
    table_step = support.width() / (kTableNodes - 1);
    const auto pts = kinks();
    for (int i = 0; i < kTableNodes; ++i) {
      const double d = i * table_step;
      std::vector<double> breaks;
      for (double p : pts) {
        breaks.push_back(p);
        breaks.push_back(p - d);
      }
      table[i] = quad::integrate_pieces(
        [&](double t) { return value(t) * value(t + d); },
        support.lo,
        support.hi - d,
        breaks,
        kTableTolerance);
    }
  }
};

} // namespace detail

namespace {

using Key = std::tuple<int, int, int>;

std::mutex&
cache_mutex()
{
  static std::mutex m;
  return m;
}

std::map<Key, std::shared_ptr<const detail::KernelData>>&
cache()
{
  static std::map<Key, std::shared_ptr<const detail::KernelData>> c;
  return c;
}

Key
key_of(KernelFamily family, int order, std::optional<Side> side)
{
  const int s = side ? (*side == Side::left ? 1 : 2) : 0;
  return { static_cast<int>(family), order, s };
}

std::shared_ptr<const detail::KernelData>
make_symmetric(KernelFamily family, int order)
{
  auto d = std::make_shared<detail::KernelData>();
  d->family = family;
  d->order = order;
  auto& f = d->functionals;
  f.mu0 = 1.0;
  f.mu1 = 0.0;
  if (family == KernelFamily::polynomial) {
    d->kappa = polynomial_normalizer(order);
    d->support = { -1.0, 1.0 };
    f.R = d->kappa * d->kappa / polynomial_normalizer(2 * order);
    f.mu2 = 1.0 / (2.0 * order + 3.0);
    f.mu1_star = d->kappa / (order + 1.0);
  } else {
    d->support = { -kGaussianCutoff, kGaussianCutoff };
    f.R = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
    f.mu2 = 1.0;
    f.mu1_star = std::sqrt(2.0 / std::numbers::pi);
  }
  if (family == KernelFamily::polynomial)
    d->build_table();
  return d;
}

std::shared_ptr<const detail::KernelData>
make_onesided(std::shared_ptr<const detail::KernelData> base, Side side)
{
  const auto& bf = base->functionals;
  const double denom = bf.mu2 - bf.mu1_star * bf.mu1_star;
  if (!(denom > 0.0))
    throw DegenerateKernelError("mu2(K) - mu1*(K)^2 <= 0 for base kernel");

  auto d = std::make_shared<detail::KernelData>();
  d->family = base->family;
  d->order = base->order;
  d->side = side;
  d->a = bf.mu2 / denom;
  d->b = bf.mu1_star / denom;
  d->base = base;
  d->support = side == Side::left ? Interval{ base->support.lo, 0.0 }
                                  : Interval{ 0.0, base->support.hi };
  auto& f = d->functionals;
  f.mu0 = d->integrate([&](double u) { return d->value(u); });
  f.mu1 = d->integrate([&](double u) { return u * d->value(u); });
  f.mu2 = d->integrate([&](double u) { return u * u * d->value(u); });
  f.R = d->integrate([&](double u) {
    const double v = d->value(u);
    return v * v;
  });
  f.mu1_star = 2.0 * quad::integrate_pieces(
                       [&](double u) { return u * d->value(u); },
                       0.0,
                       d->support.hi,
                       {},
                       kFunctionalTolerance);
  d->build_table();
  return d;
}

std::shared_ptr<const detail::KernelData>
intern(KernelFamily family, int order, std::optional<Side> side)
{
  std::lock_guard lock(cache_mutex());
  auto& c = cache();
  const auto k = key_of(family, order, side);
  if (auto it = c.find(k); it != c.end())
    return it->second;

  std::shared_ptr<const detail::KernelData> d;
  if (!side) {
    d = make_symmetric(family, order);
  } else {
    const auto bk = key_of(family, order, std::nullopt);
    auto it = c.find(bk);
    auto base = it != c.end() ? it->second : make_symmetric(family, order);
    c.emplace(bk, base);
    d = make_onesided(base, *side);
  }
  c.emplace(k, d);
  return d;
}

} // namespace

double
polynomial_normalizer(int r)
{
  // int_{-1}^{1} (1-u^2)^r du = sqrt(pi) Gamma(r+1) / Gamma(r+3/2)
  return std::exp(std::lgamma(r + 1.5) - std::lgamma(r + 1.0)) /
         std::sqrt(std::numbers::pi);
}

Kernel
Kernel::polynomial(int r)
{
  if (r < 1)
    throw DomainError("polynomial kernel order must be >= 1");
  return Kernel(intern(KernelFamily::polynomial, r, std::nullopt));
}

Kernel
Kernel::gaussian()
{
  return Kernel(intern(KernelFamily::gaussian, 0, std::nullopt));
}

Kernel
Kernel::parse(const std::string& name)
{
  if (name == "epanechnikov")
    return epanechnikov();
  if (name == "quartic")
    return quartic();
  if (name == "gaussian")
    return gaussian();
  if (name.rfind("poly", 0) == 0 && name.size() > 4) {
    try {
      std::size_t used = 0;
      const int r = std::stoi(name.substr(4), &used);
      if (used == name.size() - 4)
        return polynomial(r);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown kernel '" + name + "'");
}

double
Kernel::operator()(double u) const
{
  return data_->value(u);
}

double
Kernel::derivative(double u) const
{
  return data_->derivative(u);
}

KernelFamily
Kernel::family() const
{
  return data_->family;
}

int
Kernel::order() const
{
  return data_->order;
}

std::optional<Side>
Kernel::side() const
{
  return data_->side;
}

Kernel
Kernel::base() const
{
  return data_->base ? Kernel(data_->base) : *this;
}

Interval
Kernel::support() const
{
  return data_->support;
}

const KernelFunctionals&
Kernel::functionals() const
{
  return data_->functionals;
}

double
Kernel::autocorrelation(double d) const
{
  return data_->autocorrelation(d);
}

std::string
Kernel::name() const
{
  std::string base = data_->family == KernelFamily::gaussian
                       ? "gaussian"
                       : (data_->order == 1 ? "epanechnikov"
                                            : "poly" + std::to_string(data_->order));
  if (!data_->side)
    return base;
  return to_string(*data_->side) + "(" + base + ")";
}

double
eval_kernel(const Kernel& k, double u)
{
  return k(u);
}

double
eval_kernel_deriv(const Kernel& k, double u)
{
  return k.derivative(u);
}

const KernelFunctionals&
functionals(const Kernel& k)
{
  return k.functionals();
}

Kernel
onesided_equivalent(const Kernel& base, Side side)
{
  if (!base.symmetric())
    throw DomainError("one-sided equivalent kernels need a symmetric base");
  return Kernel(intern(base.family(), base.order(), side));
}

double
rescale_factor(const Kernel& target, const Kernel& indirect)
{
  const auto& k = target.functionals();
  const auto& l = indirect.functionals();
  return std::pow(k.R / (k.mu2 * k.mu2) * (l.mu2 * l.mu2) / l.R, 0.2);
}

std::string
to_string(Side side)
{
  return side == Side::left ? "left" : "right";
}

} // namespace bwsel
