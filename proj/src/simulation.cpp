#include "bwsel/simulation.hpp"
#include "bwsel/errors.hpp"
#include "bwsel/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace bwsel {

double
ise(const Sample& s, double h, const Kernel& k, const Design& d, int grid_points)
{
  if (!(h > 0.0))
    throw DomainError("bandwidth must be positive");
  if (grid_points < 2)
    throw DomainError("ISE grid needs at least two points");
  const auto sup = d.effective_support();
  const double lo = std::min(sup.lo, s.values().front()) - 3.0 * h;
  const double hi = std::max(sup.hi, s.values().back()) + 3.0 * h;
  std::vector<double> grid(grid_points);
  const double step = (hi - lo) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i)
    grid[i] = lo + i * step;
  const auto est = kde_evaluate(s, h, k, grid);

  double sum = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double diff = est.values[i] - d.density(grid[i]);
    const double w = (i == 0 || i == grid_points - 1) ? 0.5 : 1.0;
    sum += w * diff * diff;
  }
  return sum * step;
}

double
find_h_ise(const Sample& s, const Kernel& k, const Design& d, int grid_points)
{
  const auto [lo, hi] = search_interval(s);
  return minimize_score([&](double h) { return ise(s, h, k, d, grid_points); }, lo, hi).h;
}

std::mt19937_64
replication_engine(std::uint64_t seed, int design, int n, int rep)
{
  std::seed_seq seq{ static_cast<std::uint32_t>(seed & 0xffffffffu),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(design),
                     static_cast<std::uint32_t>(n),
                     static_cast<std::uint32_t>(rep) };
  return std::mt19937_64(seq);
}

double
empirical_quantile(std::vector<double> values, double p)
{
  if (values.empty())
    return NAN;
  std::sort(values.begin(), values.end());
  const double pos = p * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

SummaryMeasures
summarize(const std::string& selector, const std::vector<ReplicationRecord>& records)
{
  SummaryMeasures m;
  m.selector = selector;
  std::vector<double> ises, rel_ise, bias, rel_h;
  for (const auto& r : records) {
    if (r.selector != selector)
      continue;
    m.boundary_hits += r.boundary_hits;
    if (r.failed) {
      ++m.failures;
      continue;
    }
    ises.push_back(r.ise);
    rel_ise.push_back(std::abs(r.ise - r.ise_oracle) / r.ise_oracle);
    bias.push_back(r.h - r.h_ise);
    rel_h.push_back(std::abs(r.h - r.h_ise) / r.h_ise);
  }
  m.count = static_cast<int>(ises.size());
  if (ises.empty())
    return m;
  const double n = static_cast<double>(ises.size());
  const double mean = std::accumulate(ises.begin(), ises.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : ises)
    ss += (v - mean) * (v - mean);
  const double sd = ises.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  m.m1 = kTableUnit * mean;
  m.m2 = kTableUnit * sd;
  m.m3 = empirical_quantile(rel_ise, 0.9);
  m.m4 = kTableUnit * std::accumulate(bias.begin(), bias.end(), 0.0) / n;
  m.m5 = empirical_quantile(rel_h, 0.9);
  m.m1_stderr = m.m2 / std::sqrt(n);
  return m;
}

bool
ExperimentResult::exceeds_failure_threshold(int replications) const
{
  for (const auto& cell : cells)
    for (const auto& s : cell.summaries)
      if (s.failures > kMaxFailureFraction * replications)
        return true;
  return false;
}

namespace {

std::vector<ReplicationRecord>
run_replication(const ExperimentConfig& cfg, const Design& design, int n, int rep)
{
  auto rng = replication_engine(cfg.seed, design.id(), n, rep);
  const Sample s = design_sample(design, static_cast<std::size_t>(n), rng);
  const SelectionContext ctx(s);

  std::vector<ReplicationRecord> out;
  ReplicationRecord oracle;
  oracle.rep = rep;
  oracle.selector = "ise";
  oracle.h_ise = find_h_ise(s, cfg.target, design, cfg.grid_resolution);
  oracle.ise_oracle = ise(s, oracle.h_ise, cfg.target, design, cfg.grid_resolution);
  oracle.h = oracle.h_ise;
  oracle.ise = oracle.ise_oracle;
  out.push_back(oracle);

  for (const auto& spec : cfg.selectors) {
    ReplicationRecord r;
    r.rep = rep;
    r.selector = spec.name();
    r.h_ise = oracle.h_ise;
    r.ise_oracle = oracle.ise_oracle;
    try {
      const auto sel = select(ctx, spec);
      r.h = sel.h;
      r.boundary_hits = sel.boundary_hits;
      r.ise = ise(s, sel.h, cfg.target, design, cfg.grid_resolution);
    } catch (const SelectionError&) {
      r.failed = true;
      r.h = NAN;
      r.ise = NAN;
    }
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace

ExperimentResult
run_experiment(const ExperimentConfig& cfg)
{
  if (cfg.replications < 1)
    throw ConfigError("replications must be >= 1");

  struct Task
  {
    std::size_t cell;
    int rep;
  };
  ExperimentResult result;
  std::vector<Design> designs;
  std::vector<Task> tasks;
  for (int d : cfg.designs) {
    for (int n : cfg.sample_sizes) {
      result.cells.push_back({ d, n, {}, {} });
      designs.push_back(make_design(d));
      for (int rep = 0; rep < cfg.replications; ++rep)
        tasks.push_back({ result.cells.size() - 1, rep });
    }
  }

  std::vector<std::vector<ReplicationRecord>> outputs(tasks.size());
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const auto& t = tasks[i];
        const auto& cell = result.cells[t.cell];
        outputs[i] = run_replication(cfg, designs[t.cell], cell.n, t.rep);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(worker);
  }
  if (error)
    std::rethrow_exception(error);

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& recs = result.cells[tasks[i].cell].records;
    recs.insert(recs.end(), outputs[i].begin(), outputs[i].end());
  }
  for (auto& cell : result.cells) {
    cell.summaries.push_back(summarize("ise", cell.records));
    for (const auto& spec : cfg.selectors)
      cell.summaries.push_back(summarize(spec.name(), cell.records));
  }
  return result;
}

} // namespace bwsel
