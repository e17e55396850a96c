#include "bwsel/asymptotics.hpp"
#include "bwsel/errors.hpp"
#include "bwsel/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace bwsel;
namespace fs = std::filesystem;

enum Exit
{
  ok = 0,
  runtime_failure = 1,
  bad_input = 2,
  too_many_failures = 3
};

fs::path
default_out_dir()
{
  if (const char* env = std::getenv("BWSEL_OUT_DIR"); env && *env)
    return env;
  return "bwsel-out";
}

std::vector<std::pair<std::string, std::string>>
split_overrides(const std::vector<std::string>& raw)
{
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override '" + kv + "' is not key=value");
    out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return out;
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p);
  if (!in)
    throw ConfigError("cannot open config file " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int
cmd_run(const fs::path& config_path,
        const std::vector<std::string>& sets,
        int workers,
        const fs::path& out_dir)
{
  const auto text = slurp(config_path);
  auto overrides = split_overrides(sets);
  auto cfg = parse_config(text, overrides);
  cfg.workers = workers;

  std::string hashed = text;
  for (const auto& [k, v] : overrides)
    hashed += "\n" + k + "=" + v;

  const auto result = run_experiment(cfg);
  auto outputs = write_experiment_csvs(result, out_dir);
  const bool failed = result.exceeds_failure_threshold(cfg.replications);
  if (!failed)
    write_manifest(out_dir, "run", content_hash(hashed), cfg.seed, outputs);

  for (const auto& cell : result.cells) {
    fmt::print("design {} n {}\n", cell.design, cell.n);
    for (const auto& s : cell.summaries)
      fmt::print("  {:<10} m1 {:8.4f} (se {:.4f})  m4 {:8.4f}  failures {}  boundary {}\n",
                 s.selector,
                 s.m1,
                 s.m1_stderr,
                 s.m4,
                 s.failures,
                 s.boundary_hits);
  }
  if (failed) {
    fmt::print(std::cerr, "error: a selector failed in more than 2% of replications\n");
    return too_many_failures;
  }
  return ok;
}

int
cmd_constants(int max_order,
              const std::string& target_name,
              const std::string& mode_name,
              const fs::path& out_dir)
{
  asymptotics::Normalization mode;
  if (mode_name == "analytic")
    mode = asymptotics::Normalization::analytic;
  else if (mode_name == "cv-anchor")
    mode = asymptotics::Normalization::cv_anchor;
  else
    throw ConfigError("normalization must be analytic or cv-anchor");
  if (max_order < 2)
    throw ConfigError("--max-order must be >= 2");

  const auto rows = asymptotics::constant_table(Kernel::parse(target_name), max_order, mode);
  fs::create_directories(out_dir);
  const auto path = out_dir / "constants.csv";
  {
    std::ofstream out(path);
    write_constants_csv(out, rows);
  }
  write_constants_csv(std::cout, rows);
  write_manifest(out_dir,
                 "constants",
                 content_hash(fmt::format("{}|{}|{}", max_order, target_name, mode_name)),
                 0,
                 { path });
  return ok;
}

int
cmd_select(const fs::path& data,
           const std::string& selector,
           const std::string& target_name,
           bool emit_density,
           const fs::path& out_dir)
{
  const Sample s = read_sample_file(data);
  if (s.size() < 10)
    throw ConfigError(fmt::format("{} holds {} values, need at least 10", data.string(), s.size()));
  const Kernel target = Kernel::parse(target_name);
  const auto spec = SelectorSpec::parse(selector, target);
  const auto res = select(s, spec);

  fmt::print("selector {}\n", spec.name());
  fmt::print("n {}\n", s.size());
  fmt::print("h {:.10g}\n", res.h);
  fmt::print("raw_h {:.10g}\n", res.raw_h);
  fmt::print("boundary_hits {}\n", res.boundary_hits);
  for (const auto& [name, value] : res.components)
    fmt::print("component {} {:.10g}\n", name, value);
  for (const auto& w : res.warnings)
    fmt::print(std::cerr, "warning: {}\n", w);

  if (emit_density) {
    constexpr int points = 512;
    const double lo = s.values().front() - 3.0 * res.h;
    const double hi = s.values().back() + 3.0 * res.h;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
      grid[i] = lo + (hi - lo) * i / (points - 1);
    const auto est = kde_evaluate(s, res.h, target, grid);
    fs::create_directories(out_dir);
    const auto path = out_dir / "density.csv";
    {
      std::ofstream out(path);
      out << "x,density\n";
      for (int i = 0; i < points; ++i)
        fmt::print(out, "{:.17g},{:.17g}\n", est.grid[i], est.values[i]);
    }
    write_manifest(out_dir, "select", content_hash(slurp(data) + "|" + selector), 0, { path });
    fmt::print("density {}\n", path.string());
  }
  return ok;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Kernel density bandwidth selection by (indirect) cross- and do-validation" };
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  fs::path out_dir = default_out_dir();

  auto* run = app.add_subcommand("run", "Run a simulation experiment from a JSON config");
  fs::path config_path;
  int workers = 1;
  std::vector<std::string> sets;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (default $BWSEL_OUT_DIR)");
  run->add_option("--set", sets, "Override a top-level config field, key=value");

  auto* constants = app.add_subcommand("constants", "Tabulate asymptotic variance constants");
  int max_order = 8;
  std::string target_name = "epanechnikov";
  std::string mode_name = "analytic";
  constants->add_option("--max-order", max_order, "Largest indirect kernel order r");
  constants->add_option("--target", target_name, "Target kernel");
  constants->add_option("--normalization", mode_name, "analytic or cv-anchor");
  constants->add_option("--out", out_dir, "Output directory (default $BWSEL_OUT_DIR)");

  auto* sel = app.add_subcommand("select", "Select a bandwidth for a data file");
  fs::path data;
  std::string selector;
  bool emit_density = false;
  sel->add_option("--data", data, "One number per line, '#' comments")->required();
  sel->add_option("--selector", selector, "cv, icv<r>, icvg, do, ido<r>, idog, pi, median13, ...")
    ->required();
  sel->add_option("--target", target_name, "Target kernel");
  sel->add_flag("--emit-density", emit_density, "Write the estimate on a 512-point grid");
  sel->add_option("--out", out_dir, "Output directory (default $BWSEL_OUT_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : bad_input;
  }

  try {
    if (*run)
      return cmd_run(config_path, sets, workers, out_dir);
    if (*constants)
      return cmd_constants(max_order, target_name, mode_name, out_dir);
    return cmd_select(data, selector, target_name, emit_density, out_dir);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return bad_input;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return runtime_failure;
  }
}
