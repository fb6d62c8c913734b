#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmarc/montecarlo.hpp"

namespace cfmarc {

inline constexpr const char* kVersion = "1.0.0";

// Strategy <-> table-name mapping used in filenames and CLI flags.
std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

// Shortest decimal form that parses back to the identical double; every
// real written to a table or report goes through this.
std::string format_double(double v);

// SNR grid syntax: either a comma-separated list ("10,20,30") or an
// inclusive range "start:step:stop" ("0:5:40"). Throws
// std::invalid_argument on malformed input.
std::vector<double> parse_snr_grid(const std::string& text);

// Config files are UTF-8 key=value lines with '#' comments. Keys: m, r,
// seed (required), delta_sr, delta_rd, kappa, snr_db, trials (optional
// with documented defaults). Unknown keys are errors.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical serialization of a config; its FNV-1a hash is printed in the
// reproducibility line so two runs can be compared at a glance.
std::string config_canonical(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);

// Sweep tables: one header line, then one row per SNR point with exactly
// the raw counters. Probabilities are never stored; they are recomputed
// on read so aggregation stays lossless.
struct OutputTable {
  std::vector<double> sd_snrdb;
  std::vector<StrategyCounters> rows;
};

std::string format_table(const OutputTable& table);
OutputTable parse_table(const std::string& text);
void write_table(const std::string& path, const OutputTable& table);
OutputTable read_table(const std::string& path);

OutputTable table_from_sweep(const SweepResult& sr, Strategy s);
// Equation curves reuse the schema: the failure count fills both outage
// columns, rank failures are zero, and each trial is one round.
OutputTable table_from_equations(const EquationSweep& es, int m);

// Per-link failure counters, same conventions as the sweep tables.
struct ComponentTable {
  std::vector<double> sd_snrdb;
  std::vector<ComponentCounters> rows;
};

std::string format_component_table(const ComponentTable& table);
ComponentTable parse_component_table(const std::string& text);
void write_component_table(const std::string& path,
                           const ComponentTable& table);
ComponentTable read_component_table(const std::string& path);
ComponentTable component_table_from_sweep(const SweepResult& sr);

}  // namespace cfmarc
