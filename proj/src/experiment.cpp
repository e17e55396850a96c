#include "bwsel/experiment.hpp"
#include "bwsel/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace bwsel {

namespace {

using nlohmann::json;

const json&
require(const json& doc, const char* field)
{
  if (!doc.contains(field))
    throw ConfigError(fmt::format("config: missing required field '{}'", field));
  return doc.at(field);
}

std::vector<int>
int_list(const json& doc, const char* field, int min, int max)
{
  const auto& v = require(doc, field);
  if (!v.is_array() || v.empty())
    throw ConfigError(fmt::format("config: '{}' must be a non-empty array", field));
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer())
      throw ConfigError(fmt::format("config: '{}[{}]' must be an integer", field, i));
    const auto x = v[i].get<long long>();
    if (x < min || x > max)
      throw ConfigError(
        fmt::format("config: '{}[{}]' = {} outside [{}, {}]", field, i, x, min, max));
    out.push_back(static_cast<int>(x));
  }
  return out;
}

int
int_field(const json& doc, const char* field, int min, int fallback, bool required)
{
  if (!doc.contains(field)) {
    if (required)
      throw ConfigError(fmt::format("config: missing required field '{}'", field));
    return fallback;
  }
  const auto& v = doc.at(field);
  if (!v.is_number_integer())
    throw ConfigError(fmt::format("config: '{}' must be an integer", field));
  const auto x = v.get<long long>();
  if (x < min)
    throw ConfigError(fmt::format("config: '{}' must be >= {}, got {}", field, min, x));
  return static_cast<int>(x);
}

json
parse_override_value(const std::string& text)
{
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

} // namespace

ExperimentConfig
parse_config(const std::string& text,
             const std::vector<std::pair<std::string, std::string>>& overrides)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("config: top level must be an object");
  for (const auto& [key, value] : overrides)
    doc[key] = parse_override_value(value);

  const int version = int_field(doc, "schema_version", 1, 0, true);
  if (version != kSchemaVersion)
    throw ConfigError(fmt::format("config: unsupported schema_version {}", version));

  ExperimentConfig cfg;
  cfg.designs = int_list(doc, "designs", 1, 6);
  cfg.sample_sizes = int_list(doc, "sample_sizes", 10, 1000000);
  cfg.replications = int_field(doc, "replications", 1, 0, true);
  cfg.grid_resolution = int_field(doc, "grid_resolution", 16, kDefaultIseGrid, false);

  const auto& seed = require(doc, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    throw ConfigError("config: 'seed' must be a non-negative integer");
  cfg.seed = seed.get<std::uint64_t>();

  if (doc.contains("target_kernel")) {
    if (!doc["target_kernel"].is_string())
      throw ConfigError("config: 'target_kernel' must be a string");
    try {
      cfg.target = Kernel::parse(doc["target_kernel"].get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config: 'target_kernel': ") + e.what());
    }
  }

  const auto& sel = require(doc, "selectors");
  if (!sel.is_array() || sel.empty())
    throw ConfigError("config: 'selectors' must be a non-empty array");
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (!sel[i].is_string())
      throw ConfigError(fmt::format("config: 'selectors[{}]' must be a string", i));
    try {
      cfg.selectors.push_back(SelectorSpec::parse(sel[i].get<std::string>(), cfg.target));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("config: 'selectors[{}]': {}", i, e.what()));
    }
  }
  return cfg;
}

ExperimentConfig
load_config(const std::filesystem::path& path,
            const std::vector<std::pair<std::string, std::string>>& overrides)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string
content_hash(const std::string& bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

void
write_summary_csv(std::ostream& out, const CellResult& cell)
{
  out << "selector,m1,m2,m3,m4,m5,m1_stderr,failures,boundary_hits\n";
  for (const auto& s : cell.summaries) {
    fmt::print(out,
               "{},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{},{}\n",
               s.selector,
               s.m1,
               s.m2,
               s.m3,
               s.m4,
               s.m5,
               s.m1_stderr,
               s.failures,
               s.boundary_hits);
  }
}

void
write_raw_csv(std::ostream& out, const CellResult& cell)
{
  out << "design,n,rep,selector,h,ise,h_ise,ise_oracle,failed,boundary_hits\n";
  for (const auto& r : cell.records) {
    fmt::print(out,
               "{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n",
               cell.design,
               cell.n,
               r.rep,
               r.selector,
               r.h,
               r.ise,
               r.h_ise,
               r.ise_oracle,
               r.failed ? 1 : 0,
               r.boundary_hits);
  }
}

std::vector<std::filesystem::path>
write_experiment_csvs(const ExperimentResult& result, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& cell : result.cells) {
    const auto stem = fmt::format("d{}_n{}", cell.design, cell.n);
    const auto summary = dir / ("summary_" + stem + ".csv");
    const auto raw = dir / ("raw_" + stem + ".csv");
    {
      std::ofstream out(summary);
      write_summary_csv(out, cell);
    }
    {
      std::ofstream out(raw);
      write_raw_csv(out, cell);
    }
    written.push_back(summary);
    written.push_back(raw);
  }
  return written;
}

void
write_manifest(const std::filesystem::path& dir,
               const std::string& command,
               const std::string& config_hash,
               std::uint64_t seed,
               const std::vector<std::filesystem::path>& outputs)
{
  std::filesystem::create_directories(dir);
  json m;
  m["tool"] = "bwsel";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config_hash"] = config_hash;
  m["seed"] = seed;
  json files = json::array();
  for (const auto& p : outputs)
    files.push_back(p.filename().string());
  m["outputs"] = files;
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

void
write_constants_csv(std::ostream& out, const std::vector<asymptotics::VarianceConstant>& rows)
{
  out << "family,indirect,integral,value\n";
  for (const auto& c : rows) {
    fmt::print(out,
               "{},{},{:.10g},{:.6g}\n",
               asymptotics::to_string(c.family),
               c.indirect_label(),
               c.integral,
               c.value);
  }
}

} // namespace bwsel
