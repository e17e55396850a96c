#include "bwsel/designs.hpp"
#include "bwsel/errors.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bwsel {

namespace {

double
normal_pdf(const NormalDist& d, double x)
{
  const double z = (x - d.mean) / d.sd;
  return std::exp(-0.5 * z * z) / (d.sd * std::sqrt(2.0 * std::numbers::pi));
}

double
normal_d2(const NormalDist& d, double x)
{
  const double z = (x - d.mean) / d.sd;
  return normal_pdf(d, x) * (z * z - 1.0) / (d.sd * d.sd);
}

double
gamma_pdf(const ScaledGamma& g, double y)
{
  if (y <= 0.0)
    return 0.0;
  const double a = g.shape;
  const double b = g.rate;
  return std::exp(a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(y) - b * y);
}

double
scaled_gamma_pdf(const ScaledGamma& g, double x)
{
  return g.scale * gamma_pdf(g, g.scale * x);
}

double
scaled_gamma_d2(const ScaledGamma& g, double x)
{
  const double y = g.scale * x;
  if (y <= 0.0)
    return 0.0;
  const double a = g.shape;
  const double t = (a - 1.0) / y - g.rate;
  const double g2 = gamma_pdf(g, y) * (t * t - (a - 1.0) / (y * y));
  return g.scale * g.scale * g.scale * g2;
}

} // namespace

Design::Design(int id, std::vector<MixtureComponent> components)
  : id_(id)
  , components_(std::move(components))
{}

double
Design::density(double x) const
{
  double out = 0.0;
  for (const auto& c : components_) {
    out += c.weight * std::visit(
                        [&](const auto& d) {
                          if constexpr (std::is_same_v<std::decay_t<decltype(d)>, NormalDist>)
                            return normal_pdf(d, x);
                          else
                            return scaled_gamma_pdf(d, x);
                        },
                        c.dist);
  }
  return out;
}

double
Design::density_d2(double x) const
{
  double out = 0.0;
  for (const auto& c : components_) {
    out += c.weight * std::visit(
                        [&](const auto& d) {
                          if constexpr (std::is_same_v<std::decay_t<decltype(d)>, NormalDist>)
                            return normal_d2(d, x);
                          else
                            return scaled_gamma_d2(d, x);
                        },
                        c.dist);
  }
  return out;
}

Interval
Design::effective_support() const
{
  Interval out{ INFINITY, -INFINITY };
  for (const auto& c : components_) {
    Interval part{};
    if (const auto* n = std::get_if<NormalDist>(&c.dist)) {
      part = { n->mean - 6.0 * n->sd, n->mean + 6.0 * n->sd };
    } else {
      const auto& g = std::get<ScaledGamma>(c.dist);
      // mean + 12 sd of the gamma, mapped back to the x axis
      part = { 0.0, (g.shape + 12.0 * std::sqrt(g.shape)) / (g.rate * g.scale) };
    }
    out.lo = std::min(out.lo, part.lo);
    out.hi = std::max(out.hi, part.hi);
  }
  return out;
}

double
Design::draw(std::mt19937_64& rng) const
{
  boost::random::uniform_01<double> unif;
  double u = unif(rng);
  const MixtureComponent* chosen = &components_.back();
  for (const auto& c : components_) {
    if (u < c.weight) {
      chosen = &c;
      break;
    }
    u -= c.weight;
  }
  if (const auto* n = std::get_if<NormalDist>(&chosen->dist)) {
    boost::random::normal_distribution<double> dist(n->mean, n->sd);
    return dist(rng);
  }
  const auto& g = std::get<ScaledGamma>(chosen->dist);
  boost::random::gamma_distribution<double> dist(g.shape, 1.0 / g.rate);
  return dist(rng) / g.scale;
}

Design
make_design(int id)
{
  const auto gammas = [](std::vector<double> rates, double scale) {
    std::vector<MixtureComponent> out;
    for (double b : rates)
      out.push_back({ 1.0 / rates.size(), ScaledGamma{ b * b, b, scale } });
    return out;
  };
  switch (id) {
    case 1:
      return Design(1, { { 1.0, NormalDist{ 0.5, 0.2 } } });
    case 2:
      return Design(2,
                    { { 0.5, NormalDist{ 0.35, 0.1 } }, { 0.5, NormalDist{ 0.65, 0.1 } } });
    case 3:
      return Design(3,
                    { { 1.0 / 3.0, NormalDist{ 0.25, 0.075 } },
                      { 1.0 / 3.0, NormalDist{ 0.5, 0.075 } },
                      { 1.0 / 3.0, NormalDist{ 0.75, 0.075 } } });
    case 4:
      return Design(4, gammas({ 1.5 }, 5.0));
    case 5:
      return Design(5, gammas({ 1.5, 3.0 }, 6.0));
    case 6:
      return Design(6, gammas({ 1.5, 3.0, 6.0 }, 8.0));
    default:
      throw ConfigError("design id must be in 1..6, got " + std::to_string(id));
  }
}

double
design_density(const Design& d, double x)
{
  return d.density(x);
}

double
design_density_d2(const Design& d, double x)
{
  return d.density_d2(x);
}

Sample
design_sample(const Design& d, std::size_t n, std::mt19937_64& rng)
{
  if (n < 1)
    throw DomainError("sample size must be positive");
  std::vector<double> values(n);
  for (auto& v : values)
    v = d.draw(rng);
  return Sample(std::move(values));
}

} // namespace bwsel
