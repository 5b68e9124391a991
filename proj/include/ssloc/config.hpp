#pragma once

#include <string>

#include "ssloc/pipeline.hpp"

namespace ssloc {

/// CLI-facing configuration: the experiment spec plus run bookkeeping.
/// Loaded from a JSON document with a strict schema; unknown keys are
/// rejected. Defaults reproduce the reference setup (20 m room, reflection
/// 0.5, c0 = 345 m/s, b = 0.18 m, omega = 2*pi/5, 1 deg cadence, three
/// revolutions, 200 translation steps of 0.0007 m).
struct RunConfig {
    ExperimentSpec spec;
    SourceTruth source;
    std::string output_dir = "out";
    std::string calibration_file = "calibration.txt";
    int workers = 0;  // 0 = library default

    void validate() const;
};

RunConfig default_run_config();

/// Parses a config document; `path` is used in error messages.
RunConfig parse_run_config(const std::string& json_text, const std::string& path);
RunConfig load_run_config(const std::string& path);

/// Canonical serialization of the effective configuration; also the input
/// of the manifest hash.
std::string dump_run_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical config dump plus the seed; identical
/// configs give identical manifests.
std::string config_hash(const RunConfig& cfg);

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::string& command);

// ItdSeries file format: '#'-prefixed metadata lines, then a CSV header and
// one row per sample.
void write_series_csv(const std::string& path, const ItdSeries& series);
ItdSeries read_series_csv(const std::string& path);

}  // namespace ssloc
