#pragma once

#include "bwsel/density.hpp"
#include "bwsel/kernels.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bwsel {

using ScoreTrace = std::vector<std::pair<double, double>>;

//! Relative tolerance of the golden-section refinement.
inline constexpr double kMinimizerTolerance = 1e-4;
inline constexpr int kMinimizerGridPoints = 60;
inline constexpr std::size_t kMinSelectionSize = 10;

struct Minimum
{
  double h = 0.0;
  double score = 0.0;
  bool boundary = false;
  ScoreTrace trace;
};

//! Global minimization of a univariate score over [lo, hi]: a 60-point
//! log-spaced scan, then golden-section search inside the bracket around the
//! best grid point (ties go to the smallest h). Non-finite scores are
//! skipped; throws SelectionError if none is finite.
Minimum
minimize_score(const std::function<double(double)>& score, double lo, double hi);

//! [0.05, 10] * s * n^(-1/5) with s = min(sd, IQR/1.349).
std::pair<double, double>
search_interval(const Sample& s);

enum class SelectorKind
{
  cv,
  icv,
  oscv,
  do_validation,
  ido,
  plugin,
  median13
};

struct SelectorSpec
{
  SelectorKind kind = SelectorKind::cv;
  //! Kernel whose ISE the bandwidth is meant to minimize.
  Kernel target = Kernel::epanechnikov();
  //! ICV / IDO: K_2r or the Gaussian.
  std::optional<Kernel> indirect;
  //! OSCV only.
  std::optional<Side> side;

  static SelectorSpec cv(Kernel target = Kernel::epanechnikov());
  static SelectorSpec icv(Kernel indirect, Kernel target = Kernel::epanechnikov());
  static SelectorSpec oscv(Side side, Kernel target = Kernel::epanechnikov());
  static SelectorSpec do_validation(Kernel target = Kernel::epanechnikov());
  static SelectorSpec ido(Kernel indirect, Kernel target = Kernel::epanechnikov());
  static SelectorSpec plugin(Kernel target = Kernel::epanechnikov());
  static SelectorSpec median13(Kernel target = Kernel::epanechnikov());

  //! Names: cv, icv<r>, icvg, oscv-left, oscv-right, do, ido<r>, idog, pi,
  //! median13. Indirect orders must be >= 2.
  static SelectorSpec parse(const std::string& name,
                            Kernel target = Kernel::epanechnikov());
  std::string name() const;
};

struct SelectionResult
{
  //! Bandwidth for the target kernel (data units).
  double h = 0.0;
  //! Minimizer before rescaling to the target kernel. For DO/IDO this is the
  //! mean of the two one-sided minimizers.
  double raw_h = 0.0;
  ScoreTrace score_trace;
  SelectorSpec spec;
  std::vector<std::string> warnings;
  //! Named intermediate bandwidths (one-sided minimizers, median inputs, ...).
  std::vector<std::pair<std::string, double>> components;
  //! Number of minimizations that stopped at an end of the search interval.
  int boundary_hits = 0;
};

//! A sample together with the data every selector on it shares. Throws
//! DomainError for fewer than kMinSelectionSize observations.
class SelectionContext
{
public:
  explicit SelectionContext(const Sample& s);

  const Sample& sample() const { return *sample_; }
  const PairwiseGaps& gaps() const { return gaps_; }
  double lo() const { return interval_.first; }
  double hi() const { return interval_.second; }

private:
  const Sample* sample_;
  PairwiseGaps gaps_;
  std::pair<double, double> interval_;
};

SelectionResult
select_cv(const SelectionContext& ctx, const Kernel& target);
SelectionResult
select_icv(const SelectionContext& ctx, const Kernel& target, const Kernel& indirect);
SelectionResult
select_oscv(const SelectionContext& ctx, const Kernel& target, Side side);
SelectionResult
select_do(const SelectionContext& ctx, const Kernel& target);
SelectionResult
select_ido(const SelectionContext& ctx, const Kernel& target, const Kernel& indirect);
SelectionResult
select_plugin(const SelectionContext& ctx, const Kernel& target);
SelectionResult
select_median13(const SelectionContext& ctx, const Kernel& target);
SelectionResult
select(const SelectionContext& ctx, const SelectorSpec& spec);

SelectionResult
select_cv(const Sample& s, const Kernel& target);
SelectionResult
select_icv(const Sample& s, const Kernel& target, const Kernel& indirect);
SelectionResult
select_oscv(const Sample& s, const Kernel& target, Side side);
SelectionResult
select_do(const Sample& s, const Kernel& target);
SelectionResult
select_ido(const Sample& s, const Kernel& target, const Kernel& indirect);
SelectionResult
select_plugin(const Sample& s, const Kernel& target);
SelectionResult
select_median13(const Sample& s, const Kernel& target);
SelectionResult
select(const Sample& s, const SelectorSpec& spec);

//! Constants of indirect do-validation with indirect kernel L = K_2r:
//!   C_I = rescale(K, L), C_r = rescale(L, L_left), direct = rescale(K, L_left).
//! h_IDO = C_I * (C_r/2) (h_L + h_R) = (direct/2) (h_L + h_R).
struct IdoConstants
{
  double c_indirect;
  double c_r;
  double direct;

  double compositional() const { return c_indirect * c_r; }
};

IdoConstants
ido_constants(const Kernel& target, const Kernel& indirect);

//! Pilot estimate of R(f'') = int f''^2 used by the plug-in selector:
//! n^-2 g^-5 sum_ij phi''''((X_i - X_j)/g), g = (2/(5n))^(1/7) sqrt(2) s.
double
plugin_curvature(const SelectionContext& ctx);

//! Median of 13 values (rank 7 of 13).
double
median_of_13(std::vector<double> values);

} // namespace bwsel
