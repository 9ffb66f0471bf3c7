#pragma once

#include "plrx/mesh.hpp"

#include <vector>

namespace plrx {

/// Switched-carrier drive: v_oc(t) = amplitude * voc(f) * U(t - t0) * cos(2*pi*f*(t - t0) + phi).
struct Excitation {
    double amplitude = 1.0; // multiplier of the 1 V/m open-circuit voltage
    double f = 100e6;       // Hz
    double phi = 0.0;       // rad, relative to the pump
    double t0 = 0.0;        // s
};

/// One pulse of a symbol-train drive; the carrier phase is continuous
/// across symbol boundaries when start times are integer carrier cycles.
struct SymbolPulse {
    double a = 0.0;    // amplitude (constellation units)
    double phi = 0.0;  // rad
    double tau = 0.0;  // s
};

struct SymbolTrainExcitation {
    double amplitude = 1.0;
    double f = 100e6;
    std::vector<SymbolPulse> pulses; // sorted by tau
};

struct Waveform {
    double dt = 0.0;
    double t_start = 0.0;
    std::vector<double> v; // load voltage, V

    [[nodiscard]] std::size_t size() const { return v.size(); }
};

/// Timestep with `samples_per_cycle` points on the fastest mixing product,
/// snapped so that 128 MS/s baseband frames align on integer strides.
[[nodiscard]] double default_timestep(const MeshCircuit& m, double f_signal,
                                      int samples_per_cycle = 512);

/// Trapezoidal integration of the mesh state (charge-form capacitor
/// q = C(t) v). Throws SolverError on divergence (parametric oscillation
/// or an unstable step) and on a timestep that violates the Nyquist guard.
[[nodiscard]] Waveform simulate(const MeshCircuit& m, const Excitation& exc, double t_end,
                                double dt);

[[nodiscard]] Waveform simulate(const MeshCircuit& m, const SymbolTrainExcitation& exc,
                                double t_end, double dt);

/// Mean of v^2 / R over the trailing `window` seconds.
[[nodiscard]] double steady_state_power(const Waveform& w, double R_load, double window);

/// CSV export, columns t_s, v_load_V; sample period in the header line.
void write_waveform_csv(const Waveform& w, const std::string& path);

} // namespace plrx
