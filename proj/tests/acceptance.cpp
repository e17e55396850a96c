// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// criteria pass. Reference numbers are the published constants and table
// cells.

#include "bwsel/asymptotics.hpp"
#include "bwsel/experiment.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

using namespace bwsel;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void
report(int id, const std::string& title, bool ok, const std::string& detail)
{
  fmt::print("criterion {} {}: {} ({})\n", id, title, ok ? "PASS" : "FAIL", detail);
  if (!ok)
    ++failures;
}

void
note(const std::string& text)
{
  fmt::print("  info: {}\n", text);
}

// 1 -------------------------------------------------------------------------

void
constants()
{
  using namespace asymptotics;
  const auto e = Kernel::epanechnikov();
  const auto q = Kernel::quartic();
  struct Check
  {
    const char* label;
    Family family;
    Kernel target;
    std::optional<Kernel> indirect;
    double published;
  };
  const std::vector<Check> checks{
    { "ICV2", Family::icv, e, Kernel::polynomial(2), 4.71 },
    { "ICV8", Family::icv, e, Kernel::polynomial(8), 3.72 },
    { "ICVG", Family::icv, e, Kernel::gaussian(), 3.48 },
    { "DO", Family::do_validation, e, std::nullopt, 2.19 },
    { "IDO2", Family::ido, e, Kernel::polynomial(2), 1.65 },
    { "IDO8", Family::ido, e, Kernel::polynomial(8), 1.37 },
    { "IDOG", Family::ido, e, Kernel::gaussian(), 1.29 },
    { "PI", Family::plugin, e, std::nullopt, 0.72 },
    { "quartic DO", Family::do_validation, q, std::nullopt, 1.89 },
    { "quartic PI", Family::plugin, q, std::nullopt, 0.83 },
  };
  int pass = 0, anchored_pass = 0;
  std::string misses;
  for (const auto& c : checks) {
    const double i = variance_integral(c.family, c.target, c.indirect);
    const double value = normalization(Normalization::analytic, c.target) * i;
    const double anchored = normalization(Normalization::cv_anchor, c.target) * i;
    const bool ok = std::abs(value - c.published) <= 0.02 + 1e-12;
    pass += ok;
    anchored_pass += std::abs(anchored - c.published) <= 0.02 + 1e-12;
    note(fmt::format("{:<10} computed {:.4f}  published {:.2f}  {}", c.label, value, c.published,
                     ok ? "ok" : "outside 0.02"));
    if (!ok)
      misses += fmt::format(" {} {:.3f} vs {:.2f};", c.label, value, c.published);
  }
  const double cv = variance_constant(Family::cv, e).value;
  note(fmt::format("CV constant {:.4f} under the analytic normalization; the published anchor is "
                   "{:.2f}",
                   cv,
                   kCvAnchor));
  note(fmt::format("with the CV-anchored normalization {}/10 checks fall within 0.02", anchored_pass));
  report(1,
         "asymptotic constants",
         pass >= 8,
         fmt::format("{}/10 within 0.02, need 8;{}", pass, misses.empty() ? " no misses" : misses));
}

// 2 -------------------------------------------------------------------------

void
monotonicity()
{
  using namespace asymptotics;
  const auto e = Kernel::epanechnikov();
  bool ok = true;
  std::string detail;
  for (Family f : { Family::icv, Family::ido }) {
    const double limit = variance_constant(f, e, Kernel::gaussian()).value;
    double previous = INFINITY, first = 0.0, last = 0.0;
    for (int r = 1; r <= 20; ++r) {
      const double v = variance_constant(f, e, Kernel::polynomial(r)).value;
      ok = ok && v < previous && v > limit;
      if (r == 1)
        first = v;
      last = v;
      previous = v;
    }
    detail += fmt::format("{} {:.3f} -> {:.3f} (limit {:.3f}); ", to_string(f), first, last, limit);
  }
  report(2, "monotone in r = 1..20 above the Gaussian limit", ok, detail);
}

// 3 and 4 -------------------------------------------------------------------

struct Cells
{
  std::map<std::pair<int, int>, CellResult> cells;

  const CellResult& at(int design, int n) const { return cells.at({ design, n }); }
};

const SummaryMeasures&
row(const CellResult& c, const std::string& selector)
{
  for (const auto& s : c.summaries)
    if (s.selector == selector)
      return s;
  throw std::runtime_error("no row " + selector);
}

// Paired standard error of mean(h_a - h_b) in table units.
double
paired_bias_se(const CellResult& c, const std::string& a, const std::string& b)
{
  std::map<int, double> ha, hb;
  for (const auto& r : c.records) {
    if (r.failed)
      continue;
    if (r.selector == a)
      ha[r.rep] = r.h;
    if (r.selector == b)
      hb[r.rep] = r.h;
  }
  std::vector<double> d;
  for (const auto& [rep, h] : ha)
    if (hb.count(rep))
      d.push_back(h - hb[rep]);
  double mean = 0.0;
  for (double x : d)
    mean += x;
  mean /= d.size();
  double ss = 0.0;
  for (double x : d)
    ss += (x - mean) * (x - mean);
  return kTableUnit * std::sqrt(ss / (d.size() - 1) / d.size());
}

Cells
simulate(int workers)
{
  Cells out;
  ExperimentConfig cfg;
  cfg.designs = { 1, 4 };
  cfg.sample_sizes = { 100, 200 };
  cfg.replications = 500;
  cfg.seed = 20100601;
  cfg.workers = workers;
  for (const char* s : { "cv", "icv2", "icv8", "icvg", "do", "pi" })
    cfg.selectors.push_back(SelectorSpec::parse(s));
  for (auto& c : run_experiment(cfg).cells)
    out.cells[{ c.design, c.n }] = std::move(c);

  cfg.designs = { 3 };
  cfg.sample_sizes = { 200 };
  cfg.selectors = { SelectorSpec::do_validation(), SelectorSpec::plugin() };
  for (auto& c : run_experiment(cfg).cells)
    out.cells[{ c.design, c.n }] = std::move(c);
  return out;
}

void
table_cell(const Cells& cells)
{
  const auto& c = cells.at(1, 100);
  const auto& oracle_row = row(c, "ise");
  const auto& cv = row(c, "cv");
  const double z_oracle = (oracle_row.m1 - 2.328) / oracle_row.m1_stderr;
  const double z_cv = (cv.m1 - 4.944) / cv.m1_stderr;
  note(fmt::format("design 1 n 100: oracle m1 {:.3f} (se {:.3f}, published 2.328), CV m1 {:.3f} "
                   "(se {:.3f}, published 4.944)",
                   oracle_row.m1,
                   oracle_row.m1_stderr,
                   cv.m1,
                   cv.m1_stderr));
  note(fmt::format("table unit factor {} applied to m1, m2, m4", kTableUnit));
  report(3,
         "Table 1 cell within 3 standard errors",
         std::abs(z_oracle) <= 3.0 && std::abs(z_cv) <= 3.0,
         fmt::format("oracle z = {:+.2f}, CV z = {:+.2f}", z_oracle, z_cv));
}

void
orderings(const Cells& cells)
{
  const std::vector<std::string> chain{ "cv", "icv2", "icv8", "icvg" };
  bool ok_a = true, ok_b = true;
  std::string detail;
  for (int n : { 100, 200 }) {
    for (int d : { 1, 4 }) {
      const auto& c = cells.at(d, n);
      std::string m1s, m4s;
      bool a = true, b = true;
      for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& s = row(c, chain[i]);
        m1s += fmt::format(" {:.3f}", s.m1);
        m4s += fmt::format(" {:+.3f}", s.m4);
        if (i == 0)
          continue;
        const auto& p = row(c, chain[i - 1]);
        a = a && p.m1 >= s.m1 - std::max(p.m1_stderr, s.m1_stderr);
        b = b && s.m4 > p.m4;
      }
      note(fmt::format("design {} n {}: m1 CV..ICVG{}  m4{}", d, n, m1s, m4s));
      if (n == 100) {
        ok_a = ok_a && a;
        ok_b = ok_b && b;
        detail += fmt::format("design {} m1 {} m4 {}; ", d, a ? "ok" : "broken", b ? "ok" : "broken");
      }
    }
  }
  const auto& c3 = cells.at(3, 200);
  const double pi = row(c3, "pi").m4, dv = row(c3, "do").m4;
  const double se = paired_bias_se(c3, "pi", "do");
  const bool ok_c = pi >= 2.0 * dv && pi - dv > 3.0 * se;
  note(fmt::format("design 3 n 200: m4 PI {:.3f} vs DO {:.3f} (paired se {:.3f}; published "
                   "12.857 vs 1.895)",
                   pi,
                   dv,
                   se));
  detail += fmt::format("design 3 m4 PI/DO = {:.2f}", pi / dv);
  report(4, "table orderings", ok_a && ok_b && ok_c, detail);
}

// 5 -------------------------------------------------------------------------

Sample
normal_sample(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> xs(n);
  for (auto& x : xs)
    x = z(rng);
  return Sample(std::move(xs));
}

double
cv_oracle(const std::vector<double>& xs, double h, const Kernel& k)
{
  const auto sup = k.support();
  std::vector<double> breaks;
  for (double xi : xs)
    for (double e : { sup.lo, 0.0, sup.hi })
      breaks.push_back(xi - e * h);
  std::sort(breaks.begin(), breaks.end());
  const auto f = [&](double x) {
    double sum = 0.0;
    for (double xi : xs)
      sum += k((xi - x) / h);
    return sum / (xs.size() * h);
  };
  double sq = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b - a < 1e-14)
      continue;
    const double pad = 1e-12 * (b - a);
    sq += oracle::simpson([&](double x) { return f(x) * f(x); }, a + pad, b - pad, 400);
  }
  const std::size_t n = xs.size();
  const bool loo = k(0.0) != 0.0;
  double fit = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (!loo || i != j)
        inner += k((xs[j] - xs[i]) / h);
    fit += inner / ((loo ? n - 1 : n) * h);
  }
  return sq - 2.0 * fit / n;
}

void
properties()
{
  int checks = 0, passed = 0;
  std::vector<std::string> broken;
  const auto check = [&](bool ok, const std::string& what) {
    ++checks;
    passed += ok;
    if (!ok)
      broken.push_back(what);
  };

  const auto s = normal_sample(100, 314);
  const SelectionContext ctx(s);
  const double tol = 2.0 * kMinimizerTolerance;
  for (const char* name : { "cv", "icv2", "icv8", "icvg", "oscv-left", "oscv-right", "do", "ido2",
                            "ido8", "idog", "pi", "median13" }) {
    const auto spec = SelectorSpec::parse(name);
    const double h = select(ctx, spec).h;
    bool ok = h > 0.0 && std::isfinite(h);
    for (auto [a, c] : { std::pair{ 7.5, 1.0 }, std::pair{ 0.0, 3.0 }, std::pair{ -40.0, 0.25 } })
      ok = ok && std::abs(select(s.affine(a, c), spec).h / (c * h) - 1.0) <= tol;
    check(ok, std::string("equivariance ") + name);
  }

  const auto e = Kernel::epanechnikov();
  const double h_do = select_do(ctx, e).h;
  check(std::abs(select_ido(ctx, e, e).h - h_do) <= 1e-14 * h_do, "IDO(r=1) = DO");
  check(select_icv(ctx, e, e).h == select_cv(ctx, e).h, "ICV(target) = CV");

  {
    std::vector<double> v{ 5, 5, 5, 5, 5, 5, 5, 1, 2, 9, 10, 11, 0 };
    check(median_of_13(v) == 5.0, "median of 7 equal values");
    std::vector<double> w{ 3.0, 2.5, 7.0, 4.0, 2.2, 6.0, 8.0, 9.0, 1, 1, 1, 1, 1 };
    bool ok = median_of_13(w) == 2.5;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
      std::shuffle(w.begin(), w.end(), rng);
      ok = ok && median_of_13(w) == 2.5;
    }
    check(ok, "median rank identities");
    const auto m = select_median13(ctx, e);
    std::vector<double> parts;
    for (const auto& p : m.components)
      parts.push_back(p.second);
    check(parts.size() == 13 && median_of_13(parts) == m.h, "median of printed components");
  }

  {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> bw(0.1, 1.2);
    const std::vector<Kernel> ks{ e, Kernel::quartic(), Kernel::gaussian(),
                                  onesided_equivalent(e, Side::left),
                                  onesided_equivalent(Kernel::polynomial(4), Side::right) };
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      std::vector<double> xs(12 + t % 7);
      for (auto& x : xs)
        x = z(rng);
      const double h = bw(rng);
      const auto& k = ks[t % ks.size()];
      worst = std::max(worst, std::abs(cv_score(Sample(xs), h, k) - cv_oracle(xs, h, k)));
    }
    check(worst <= 1e-5, fmt::format("CV double sum vs quadrature (worst {:.2e})", worst));
  }

  {
    const auto r = s.affine(0.0, -1.0);
    bool ok = true;
    for (double h : { 0.2, 0.5, 1.0 })
      ok = ok && std::abs(oscv_score(s, h, e, Side::left) - oscv_score(r, h, e, Side::right)) <= 1e-12;
    ok = ok && std::abs(select_oscv(s, e, Side::left).h / select_oscv(r, e, Side::right).h - 1.0) <= tol;
    check(ok, "one-sided reflection symmetry");
  }

  for (int id = 1; id <= 6; ++id) {
    const auto d = make_design(id);
    const auto sup = d.effective_support();
    const double mass = oracle::simpson([&](double x) { return d.density(x); }, sup.lo, sup.hi, 400000);
    check(std::abs(mass - 1.0) <= 1e-6, fmt::format("design {} integrates to 1", id));

    const int cells = 200000;
    const double step = (sup.hi - sup.lo) / cells;
    std::vector<double> cdf{ 0.0 };
    for (int i = 0; i < cells; ++i) {
      const double a = sup.lo + i * step;
      cdf.push_back(cdf.back() + oracle::simpson([&](double x) { return d.density(x); }, a, a + step, 8));
    }
    std::mt19937_64 rng(500 + id);
    const auto sample = design_sample(d, 10000, rng);
    double ks = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double pos = std::clamp((sample[i] - sup.lo) / step, 0.0, cells - 1e-9);
      const auto j = static_cast<std::size_t>(pos);
      const double f = cdf[j] + (pos - j) * (cdf[j + 1] - cdf[j]);
      ks = std::max({ ks, (i + 1) / 1e4 - f, f - i / 1e4 });
    }
    check(ks < 1.628 / 100.0, fmt::format("design {} KS {:.4f}", id, ks));
  }

  std::string detail = fmt::format("{}/{} checks", passed, checks);
  for (const auto& b : broken)
    detail += "; failed: " + b;
  report(5, "property suites", passed == checks, detail);
}

// 6 -------------------------------------------------------------------------

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void
reproducibility()
{
  ExperimentConfig cfg;
  cfg.designs = { 2, 5 };
  cfg.sample_sizes = { 100 };
  cfg.replications = 16;
  cfg.seed = 77;
  for (const char* s : { "cv", "icvg", "do", "idog", "pi", "median13" })
    cfg.selectors.push_back(SelectorSpec::parse(s));

  const auto base = fs::temp_directory_path() / "bwsel_acceptance_repro";
  fs::remove_all(base);
  std::vector<std::vector<fs::path>> written;
  for (int workers : { 1, 8 }) {
    cfg.workers = workers;
    written.push_back(write_experiment_csvs(run_experiment(cfg), base / std::to_string(workers)));
  }
  bool same = written[0].size() == written[1].size() && !written[0].empty();
  for (std::size_t i = 0; same && i < written[0].size(); ++i)
    same = written[0][i].filename() == written[1][i].filename() &&
           slurp(written[0][i]) == slurp(written[1][i]);
  fs::remove_all(base);
  report(6,
         "byte-identical output for 1 and 8 workers",
         same,
         fmt::format("{} files compared", written[0].size()));
}

} // namespace

int
main()
{
  const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  try {
    constants();
    monotonicity();
    const auto cells = simulate(workers);
    table_cell(cells);
    orderings(cells);
    properties();
    reproducibility();
  } catch (const std::exception& e) {
    fmt::print("acceptance aborted: {}\n", e.what());
    return 2;
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
