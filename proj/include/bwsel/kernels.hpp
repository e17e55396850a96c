#pragma once

#include <memory>
#include <optional>
#include <string>

namespace bwsel {

enum class Side
{
  left,
  right
};

enum class KernelFamily
{
  polynomial, //!< K_2r(u) = kappa_r (1 - u^2)^r on (-1, 1)
  gaussian
};

//! Closed interval carrying the (numerically) nonzero part of a kernel.
struct Interval
{
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

//! Scalar functionals of a kernel g:
//! R = int g^2, mu_l = int u^l g(u) du, mu1_star = 2 int_0^inf u g(u) du.
struct KernelFunctionals
{
  double R = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu1_star = 0.0;
};

namespace detail {
struct KernelData;
}

//! Immutable kernel descriptor.
//!
//! A kernel is either symmetric (polynomial K_2r or Gaussian) or the
//! one-sided local-linear equivalent of a symmetric base,
//!   K_L(u) = (mu2 + u mu1*) / (mu2 - mu1*^2) * 2 K(u) 1{u < 0},
//! and its mirror K_R(u) = K_L(-u). Both vanish at u = 0.
//!
//! Copies share the same data; functionals and the autocorrelation table are
//! built once per distinct kernel and interned process-wide.
class Kernel
{
public:
  static Kernel polynomial(int r);
  static Kernel epanechnikov() { return polynomial(1); }
  static Kernel quartic() { return polynomial(2); }
  static Kernel gaussian();

  //! Parses "epanechnikov", "quartic", "gaussian" or "poly<r>".
  static Kernel parse(const std::string& name);

  double operator()(double u) const;
  double derivative(double u) const;

  KernelFamily family() const;
  //! Polynomial order r of K_2r (of the base for one-sided kernels); 0 for
  //! Gaussian.
  int order() const;
  std::optional<Side> side() const;
  bool symmetric() const { return !side().has_value(); }
  //! The symmetric kernel a one-sided kernel was built from (itself otherwise).
  Kernel base() const;

  Interval support() const;
  const KernelFunctionals& functionals() const;

  //! c(d) = int k(t) k(t + d) dt, even in d. Equals the self-convolution
  //! k*k for symmetric kernels. Memoized on 4096 nodes with cubic
  //! interpolation (closed form for the Gaussian).
  double autocorrelation(double d) const;

  std::string name() const;

  friend bool operator==(const Kernel& a, const Kernel& b)
  {
    return a.data_ == b.data_;
  }

private:
  explicit Kernel(std::shared_ptr<const detail::KernelData> d)
    : data_(std::move(d))
  {}
  friend Kernel onesided_equivalent(const Kernel& base, Side side);

  std::shared_ptr<const detail::KernelData> data_;
};

double
eval_kernel(const Kernel& k, double u);

//! Derivative; at the endpoints +-1 of a polynomial kernel the interior
//! one-sided derivative is returned.
double
eval_kernel_deriv(const Kernel& k, double u);

const KernelFunctionals&
functionals(const Kernel& k);

//! Local-linear equivalent kernel of 2K(u)1{u<0} (left) or 2K(u)1{u>0}
//! (right). Throws DegenerateKernelError if mu2(K) <= mu1*(K)^2.
Kernel
onesided_equivalent(const Kernel& base, Side side);

//! (R(K)/mu2(K)^2 * mu2(L)^2/R(L))^(1/5): converts a bandwidth selected for
//! kernel L into one for kernel K.
double
rescale_factor(const Kernel& target, const Kernel& indirect);

//! kappa_r = 1 / int_{-1}^{1} (1 - u^2)^r du.
double
polynomial_normalizer(int r);

std::string
to_string(Side side);

} // namespace bwsel
