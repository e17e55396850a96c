#pragma once

#include "bwsel/kernels.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace bwsel {

//! Observations X_1..X_n, sorted ascending on construction. All values finite.
class Sample
{
public:
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const;
  //! Unbiased standard deviation.
  double stddev() const;
  //! Empirical quantile, linear interpolation between order statistics.
  double quantile(double p) const;
  double iqr() const { return quantile(0.75) - quantile(0.25); }
  //! min(sd, IQR/1.349), the robust scale used for search intervals.
  double robust_scale() const;

  //! a + c * X_i for every observation (c may be negative).
  Sample affine(double a, double c) const;

private:
  std::vector<double> values_;
};

//! One number per line; blank lines and '#' comments are skipped.
Sample
read_sample(std::istream& in);

Sample
read_sample_file(const std::filesystem::path& path);

struct DensityEstimate
{
  std::vector<double> grid;
  std::vector<double> values;
  double h = 0.0;
  Kernel kernel;
};

//! f(x) = (nh)^-1 sum_i k((X_i - x)/h) on every grid node.
DensityEstimate
kde_evaluate(const Sample& s, double h, const Kernel& k, std::span<const double> grid);

//! Sorted pairwise gaps X_j - X_i (i < j) of a sample. Shared by every
//! score evaluation on the same sample.
class PairwiseGaps
{
public:
  explicit PairwiseGaps(const Sample& s);

  std::size_t n() const { return n_; }
  std::span<const double> gaps() const { return gaps_; }

private:
  std::size_t n_;
  std::vector<double> gaps_;
};

//! Least-squares cross-validation score
//!   int f_h^2 - 2/n sum_i f_h(X_i),
//! with int f_h^2 from the exact double sum over the kernel autocorrelation.
//! The second term uses leave-one-out estimates iff k(0) != 0.
class CvScore
{
public:
  CvScore(const PairwiseGaps& gaps, Kernel k);

  double operator()(double h) const;
  const Kernel& kernel() const { return kernel_; }

private:
  const PairwiseGaps* gaps_;
  Kernel kernel_;
  bool leave_one_out_;
  double reach_; // |u| beyond which k and its autocorrelation vanish
};

double
cv_score(const Sample& s, double h, const Kernel& k);

//! cv_score with the one-sided equivalent of `base`.
double
oscv_score(const Sample& s, double h, const Kernel& base, Side side);

} // namespace bwsel
