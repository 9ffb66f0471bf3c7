#pragma once

#include "plrx/antenna.hpp"
#include "plrx/calibrate.hpp"
#include "plrx/circuit.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace plrx {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { power_sweep, step_response, constellation, evm_curve, beat_demo };

[[nodiscard]] ScenarioKind scenario_kind_from(const std::string& name);
[[nodiscard]] const char* to_string(ScenarioKind k);

struct Scenario {
    ScenarioKind kind = ScenarioKind::power_sweep;
    std::vector<std::string> configs = {"LTI", "DTV", "NDTV"};
    std::uint64_t seed = 1;

    // power_sweep
    double f_lo = 95e6;
    double f_hi = 105e6;
    int n_points = 401;
    double phi = 0.0;

    // step_response
    double t_lib = 8e-6;

    // constellation / evm_curve
    double symbol_rate = 0.5e6;
    int n_symbols = 2048;
    bool noise = false;
    std::vector<double> rates; // empty -> default grid
    double snr_anchor_dB = 30.0;
    double snr_anchor_rate = 0.25e6;

    // beat_demo
    double detune_f = 100.1e6;
    int n_phases = 8;
    double t_beat = 100e-6;
};

struct SimSetup {
    LoopGeometry geom;
    ReceiverConfig lti = lti_config();
    ReceiverConfig dtv = dtv_config();
    ReceiverConfig ndtv = ndtv_config();
    Scenario scenario;

    [[nodiscard]] const ReceiverConfig& config(const std::string& name) const;
};

/// Structured text config: sections [antenna], [configs.LTI|DTV|NDTV],
/// [scenario]; units nH, pF, MHz, ohms. Missing keys keep their canonical
/// defaults. Throws ConfigError on anything unparseable.
[[nodiscard]] SimSetup load_config(const std::string& path);

struct Artifact {
    std::string file;
    std::uint64_t fnv64 = 0;
};

struct RunResult {
    std::vector<Artifact> artifacts;
    std::string manifest_path;
};

/// Executes the scenario, writes CSV artifacts plus manifest.json into
/// out_dir. Deterministic for fixed config and seed.
RunResult run_scenario(const SimSetup& setup, const std::string& out_dir, int jobs = 1);

/// Default symbol-rate grid: 9 log-spaced points over 0.0625..4 Msym/s,
/// snapped so each symbol spans an integer number of carrier cycles and
/// divides the 128 MS/s baseband grid.
[[nodiscard]] std::vector<double> default_rate_grid(double f_center);

[[nodiscard]] std::uint64_t fnv1a64(const std::string& data);

} // namespace plrx
