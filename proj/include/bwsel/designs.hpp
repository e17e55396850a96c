#pragma once

#include "bwsel/density.hpp"
#include "bwsel/kernels.hpp"

#include <random>
#include <variant>
#include <vector>

namespace bwsel {

struct NormalDist
{
  double mean;
  double sd;
};

//! Gamma(shape a, rate b) applied on c*x: f(x) = c * g(c x; a, b).
struct ScaledGamma
{
  double shape;
  double rate;
  double scale;
};

struct MixtureComponent
{
  double weight;
  std::variant<NormalDist, ScaledGamma> dist;
};

//! One of the six test densities. Designs 1-3 are normal mixtures, 4-6 are
//! mixtures of gammas with a = b^2 on scaled axes.
class Design
{
public:
  Design(int id, std::vector<MixtureComponent> components);

  int id() const { return id_; }
  const std::vector<MixtureComponent>& components() const { return components_; }

  double density(double x) const;
  double density_d2(double x) const;
  //! Interval outside which the density is below ~1e-8 of its peak.
  Interval effective_support() const;

  //! One observation.
  double draw(std::mt19937_64& rng) const;

private:
  int id_;
  std::vector<MixtureComponent> components_;
};

//! Designs 1..6; throws ConfigError otherwise.
Design
make_design(int id);

double
design_density(const Design& d, double x);
double
design_density_d2(const Design& d, double x);

//! Draws n observations: component by weight, then a normal or gamma
//! variate (gamma draws divided by the axis scale c).
Sample
design_sample(const Design& d, std::size_t n, std::mt19937_64& rng);

} // namespace bwsel
