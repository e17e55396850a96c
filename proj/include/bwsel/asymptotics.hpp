#pragma once

#include "bwsel/kernels.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwsel::asymptotics {

// The n^(3/10)-scaled variance of every selector considered here has the
// form C_{f,K} { 4 R(K) V(f'') / (R(f'') R(f)) + c }, where only c depends on
// the selector. c is alpha * I with
//   I = int [H(u) - R(K)/R(L) * H_family(u)]^2 du   (CV, ICV, DO, IDO)
//   I = int H(u)^2 du                                (plug-in).

enum class Family
{
  cv,
  icv,
  do_validation,
  ido,
  plugin
};

std::string
to_string(Family f);

enum class Normalization
{
  //! alpha = 1/2, the ratio of the 1/50 and 1/25 prefactors.
  analytic,
  //! alpha chosen so that the classical CV constant equals 7.42.
  cv_anchor
};

inline constexpr double kAnalyticAlpha = 0.5;
inline constexpr double kCvAnchor = 7.42;

struct VarianceConstant
{
  Family family = Family::cv;
  //! Indirect kernel (ICV/IDO); empty otherwise.
  std::optional<Kernel> indirect;
  double integral = 0.0;      //!< I
  double value = 0.0;         //!< alpha * I
  double normalization = 0.0; //!< alpha

  //! "-", "2", ..., "G"
  std::string indirect_label() const;
};

//! H(u) = 4 int K(u - v) [K(v) + v K'(v)] dv.
double
h_function(const Kernel& k, double u);

//! Argument scaling d_L = (R(K)/R(L) * mu2(L)^2/mu2(K)^2)^(-1/5).
double
d_factor(const Kernel& target, const Kernel& l);

//! H_ICV,L evaluated at its own argument w (the right-hand side
//! 4 int L(u-v)[L(v)+vL'(v)]dv - 4[L(u)+uL'(u)] at u = w/d_L).
double
h_icv_function(const Kernel& target, const Kernel& l, double w);

//! H* for do-validation with K_L = onesided_equivalent(target, left),
//! evaluated at its own argument w (right-hand side at u = w/d*).
double
h_do_function(const Kernel& target, double w);

//! H_IDO,r with K_L,2r = onesided_equivalent(indirect, left), at its own
//! argument w.
double
h_ido_function(const Kernel& target, const Kernel& indirect, double w);

//! The one-sided right-hand side shared by H* and H_IDO,r at raw argument u:
//!   2 int K_L(u+v)K_L(v)dv + 2 int K_L(-u+v)K_L(v)dv
//! + 2 int K_L(u+v) v K_L'(v)dv + 2 int K_L(-u+v) v K_L'(v)dv
//! - 2 [K_L(u) + u K_L'(u) + K_L(-u) - u K_L'(-u)].
double
h_onesided_rhs(const Kernel& left_kernel, double u);

//! Unnormalized integral I for a family. `indirect` is required for ICV and
//! IDO and ignored otherwise.
double
variance_integral(Family family,
                  const Kernel& target,
                  const std::optional<Kernel>& indirect = std::nullopt);

double
normalization(Normalization mode, const Kernel& target);

VarianceConstant
variance_constant(Family family,
                  const Kernel& target,
                  const std::optional<Kernel>& indirect = std::nullopt,
                  Normalization mode = Normalization::analytic);

//! CV, ICV r = 2..max_order, ICV Gaussian, DO, IDO r = 2..max_order,
//! IDO Gaussian, PI.
std::vector<VarianceConstant>
constant_table(const Kernel& target,
               int max_order,
               Normalization mode = Normalization::analytic);

enum class HKind
{
  h,
  icv,
  do_star,
  ido
};

struct HFunctionTable
{
  HKind kind = HKind::h;
  std::vector<double> grid;
  std::vector<double> values;
  double d_factor = 1.0;
};

//! Tabulates one H-function on `grid`. `kernel` is L for icv, the indirect
//! K_2r for ido and ignored for h / do_star.
HFunctionTable
tabulate(HKind kind,
         const Kernel& target,
         const Kernel& kernel,
         std::span<const double> grid);

} // namespace bwsel::asymptotics
