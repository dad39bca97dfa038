#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlk/config.hpp"
#include "nlk/experiments.hpp"
#include "nlk/integrate.hpp"

namespace nlk {

/// Shortest decimal string that reads back to the same double. "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_number(double v);

/// Parses a config file. `overrides` are "section.key=value" strings applied
/// on top of the file. Relative nu_file paths resolve against the file's
/// directory. Throws ConfigError listing every problem found (unknown keys,
/// malformed values and invariant violations together).
SimConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});
SimConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {},
                            const std::filesystem::path& base_dir = ".");

/// Every field in a fixed order, numbers in shortest round-trip form. Parsing
/// this text gives back an equal config.
std::string canonical_config_text(const SimConfig& config);
std::uint64_t config_hash(const SimConfig& config);
std::string hash_hex(std::uint64_t h);

std::vector<double> read_values_file(const std::filesystem::path& path);

// Diagnostics CSV. Columns, in this order:
// t,mean,diameter,E_P,E_K,seminorm_sq,dist_sq,dissipation_cum,dual_bound
inline constexpr const char* kCsvHeader =
    "t,mean,diameter,E_P,E_K,seminorm_sq,dist_sq,dissipation_cum,dual_bound";
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& records);
/// sin_seminorm_sq is not stored and reads back as 0.
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

// Snapshot: three float64 {d, n, t} followed by the node values as float64,
// native byte order.
struct Snapshot {
  int dimension = 1;
  int nodes_per_axis = 0;
  PhaseField field;
};
void write_snapshot(const std::filesystem::path& path, int dimension, int nodes_per_axis,
                    const PhaseField& field);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Writes diagnostics.csv, snapshots/snapshot_NNNNNN.bin (physical frame) and
/// manifest.json under `dir`, as enabled by config.output. If a file cannot be
/// written the manifest still records a partial-output note when possible and
/// IoError is rethrown. Returns the files written.
std::vector<std::filesystem::path> write_outputs(const Trajectory& traj,
                                                 const std::filesystem::path& dir);

/// rung_00, rung_01, ... plus sweep_report.json.
void write_sweep_outputs(const SweepResult& sweep, const std::filesystem::path& dir);

/// Trajectory outputs plus relaxation_report.json.
void write_relaxation_outputs(const RelaxationReport& report, const std::filesystem::path& dir);

}  // namespace nlk
