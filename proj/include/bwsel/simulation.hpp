#pragma once

#include "bwsel/designs.hpp"
#include "bwsel/selectors.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bwsel {

inline constexpr int kDefaultIseGrid = 1024;

//! Reporting factor between raw ISE / bandwidth units and the units of the
//! published tables (applied to m1, m2, m4 and the m1 standard error).
inline constexpr double kTableUnit = 100.0;

//! int (f_h - f)^2 by the trapezoid rule on `grid_points` equispaced nodes
//! covering [min(lo, X_(1)) - 3h, max(hi, X_(n)) + 3h], where [lo, hi] is the
//! design's effective support.
double
ise(const Sample& s, double h, const Kernel& k, const Design& d, int grid_points = kDefaultIseGrid);

//! ISE-optimal bandwidth over the selectors' search interval.
double
find_h_ise(const Sample& s, const Kernel& k, const Design& d, int grid_points = kDefaultIseGrid);

struct ExperimentConfig
{
  std::vector<int> designs;
  std::vector<int> sample_sizes;
  int replications = 500;
  std::vector<SelectorSpec> selectors;
  std::uint64_t seed = 0;
  int grid_resolution = kDefaultIseGrid;
  Kernel target = Kernel::epanechnikov();
  int workers = 1;
};

//! Engine for one replication; depends only on (seed, design, n, rep).
std::mt19937_64
replication_engine(std::uint64_t seed, int design, int n, int rep);

struct ReplicationRecord
{
  int rep = 0;
  std::string selector;
  double h = 0.0;
  double ise = 0.0;
  double h_ise = 0.0;
  double ise_oracle = 0.0;
  bool failed = false;
  int boundary_hits = 0;
};

//! m1 = mean ISE, m2 = sd ISE, m3 = q90 |ISE - ISE_opt| / ISE_opt,
//! m4 = mean(h - h_ISE), m5 = q90 |h - h_ISE| / h_ISE. m1, m2, m4 and
//! m1_stderr are in table units.
struct SummaryMeasures
{
  std::string selector;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double m5 = 0.0;
  double m1_stderr = 0.0;
  int failures = 0;
  int boundary_hits = 0;
  int count = 0;
};

//! Empirical quantile with linear interpolation between order statistics.
double
empirical_quantile(std::vector<double> values, double p);

//! Summary of one selector's records (failed records excluded).
SummaryMeasures
summarize(const std::string& selector, const std::vector<ReplicationRecord>& records);

struct CellResult
{
  int design = 0;
  int n = 0;
  //! Oracle row ("ise") first, then selectors in configuration order.
  std::vector<SummaryMeasures> summaries;
  std::vector<ReplicationRecord> records;
};

struct ExperimentResult
{
  std::vector<CellResult> cells;

  //! True if any selector failed in more than 2% of the replications of
  //! any cell.
  bool exceeds_failure_threshold(int replications) const;
};

inline constexpr double kMaxFailureFraction = 0.02;

//! Runs every (design, n) cell. Replications are distributed over
//! cfg.workers threads; the result does not depend on the worker count.
ExperimentResult
run_experiment(const ExperimentConfig& cfg);

} // namespace bwsel
