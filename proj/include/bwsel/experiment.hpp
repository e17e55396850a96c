#pragma once

#include "bwsel/asymptotics.hpp"
#include "bwsel/simulation.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bwsel {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

//! Parses and validates an experiment configuration document (JSON):
//!
//!   {
//!     "schema_version": 1,
//!     "designs": [1, 4],
//!     "sample_sizes": [100, 200],
//!     "replications": 500,
//!     "selectors": ["cv", "icv2", "icv8", "icvg"],
//!     "seed": 42,
//!     "grid_resolution": 1024,          (optional)
//!     "target_kernel": "epanechnikov"   (optional)
//!   }
//!
//! `overrides` are key=value pairs applied to top-level fields before
//! validation. Throws ConfigError naming the offending field.
ExperimentConfig
parse_config(const std::string& text,
             const std::vector<std::pair<std::string, std::string>>& overrides = {});

ExperimentConfig
load_config(const std::filesystem::path& path,
            const std::vector<std::pair<std::string, std::string>>& overrides = {});

//! 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string
content_hash(const std::string& bytes);

void
write_summary_csv(std::ostream& out, const CellResult& cell);

void
write_raw_csv(std::ostream& out, const CellResult& cell);

//! Writes summary_d<D>_n<N>.csv and raw_d<D>_n<N>.csv for every cell.
//! Returns the paths written.
std::vector<std::filesystem::path>
write_experiment_csvs(const ExperimentResult& result, const std::filesystem::path& dir);

//! manifest.json with tool version, command, config hash, seed and outputs.
void
write_manifest(const std::filesystem::path& dir,
               const std::string& command,
               const std::string& config_hash,
               std::uint64_t seed,
               const std::vector<std::filesystem::path>& outputs);

//! family,indirect,integral,value
void
write_constants_csv(std::ostream& out, const std::vector<asymptotics::VarianceConstant>& rows);

} // namespace bwsel
