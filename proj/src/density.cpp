#include "bwsel/density.hpp"
#include "bwsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace bwsel {

Sample::Sample(std::vector<double> values)
  : values_(std::move(values))
{
  if (values_.empty())
    throw DomainError("sample must not be empty");
  for (double v : values_) {
    if (!std::isfinite(v))
      throw DomainError("sample contains a non-finite value");
  }
  std::sort(values_.begin(), values_.end());
}

double
Sample::mean() const
{
  return std::accumulate(values_.begin(), values_.end(), 0.0) / values_.size();
}

double
Sample::stddev() const
{
  if (values_.size() < 2)
    return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double v : values_)
    ss += (v - m) * (v - m);
  return std::sqrt(ss / (values_.size() - 1));
}

double
Sample::quantile(double p) const
{
  const double pos = p * (values_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values_.size() - 1);
  const double w = pos - lo;
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

double
Sample::robust_scale() const
{
  const double sd = stddev();
  const double q = iqr() / 1.349;
  return q > 0.0 ? std::min(sd, q) : sd;
}

Sample
Sample::affine(double a, double c) const
{
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [&](double v) {
    return a + c * v;
  });
  return Sample(std::move(out));
}

Sample
read_sample(std::istream& in)
{
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      throw ConfigError("line " + std::to_string(lineno) + ": not a number");
    }
    std::string rest;
    if (ls >> rest)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected one number per line");
    values.push_back(v);
  }
  if (values.empty())
    throw ConfigError("no data values found");
  return Sample(std::move(values));
}

Sample
read_sample_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open data file " + path.string());
  return read_sample(in);
}

DensityEstimate
kde_evaluate(const Sample& s, double h, const Kernel& k, std::span<const double> grid)
{
  if (!(h > 0.0))
    throw DomainError("bandwidth must be positive");
  if (grid.empty())
    throw DomainError("evaluation grid must not be empty");

  DensityEstimate est{ { grid.begin(), grid.end() }, {}, h, k };
  est.values.resize(grid.size());
  const auto xs = s.values();
  const auto sup = k.support();
  const double scale = 1.0 / (s.size() * h);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid[j];
    // (X_i - x)/h must fall inside the support
    auto first = std::lower_bound(xs.begin(), xs.end(), x + h * sup.lo);
    auto last = std::upper_bound(first, xs.end(), x + h * sup.hi);
    double sum = 0.0;
    for (auto it = first; it != last; ++it)
      sum += k((*it - x) / h);
    est.values[j] = sum * scale;
  }
  return est;
}

PairwiseGaps::PairwiseGaps(const Sample& s)
  : n_(s.size())
{
  const auto xs = s.values();
  gaps_.reserve(n_ * (n_ - 1) / 2);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      gaps_.push_back(xs[j] - xs[i]);
  std::sort(gaps_.begin(), gaps_.end());
}

CvScore::CvScore(const PairwiseGaps& gaps, Kernel k)
  : gaps_(&gaps)
  , kernel_(std::move(k))
  , leave_one_out_(kernel_(0.0) != 0.0)
{
  const auto sup = kernel_.support();
  reach_ = std::max(sup.width(), std::max(-sup.lo, sup.hi));
}

double
CvScore::operator()(double h) const
{
  if (!(h > 0.0))
    throw DomainError("bandwidth must be positive");
  const double n = static_cast<double>(gaps_->n());
  const auto& k = kernel_;
  const double cutoff = reach_ * h;

  double conv_sum = 0.0;
  double kern_sum = 0.0;
  for (double g : gaps_->gaps()) {
    if (g >= cutoff)
      break;
    const double d = g / h;
    conv_sum += k.autocorrelation(d);
    kern_sum += k(d) + k(-d);
  }
  const double integral_sq = (n * k.autocorrelation(0.0) + 2.0 * conv_sum) / (n * n * h);
  const double fit = leave_one_out_ ? 2.0 * kern_sum / (n * (n - 1.0) * h)
                                    : 2.0 * (n * k(0.0) + kern_sum) / (n * n * h);
  return integral_sq - fit;
}

double
cv_score(const Sample& s, double h, const Kernel& k)
{
  const PairwiseGaps gaps(s);
  return CvScore(gaps, k)(h);
}

double
oscv_score(const Sample& s, double h, const Kernel& base, Side side)
{
  return cv_score(s, h, onesided_equivalent(base, side));
}

} // namespace bwsel
