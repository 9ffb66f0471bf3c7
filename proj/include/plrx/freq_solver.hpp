#pragma once

#include "plrx/mesh.hpp"

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace plrx {

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct AcResponse {
    std::complex<double> v_load; // physical load-voltage phasor
    double power = 0.0;          // W into R_load for 1 V/m
};

/// Static (pump ignored) phasor response at f.
[[nodiscard]] AcResponse ac_response(const MeshCircuit& m, double f, double amplitude = 1.0,
                                     double phi = 0.0);

/// Solution of the coupled-harmonic mesh system at signal frequency f_s.
/// Harmonic k lives at f_k = f_s + k * f_p, k = -K..K (index k + K).
struct ConversionResult {
    double f_signal = 0.0;
    double f_pump = 0.0;
    int K = 0;
    double condition = 0.0;
    std::vector<double> f_k;
    std::vector<std::complex<double>> I_k;      // mesh current phasors
    std::vector<std::complex<double>> v_load_k; // physical load-voltage phasors

    [[nodiscard]] int idx(int k) const { return k + K; }
    [[nodiscard]] double harmonic_power(int k) const;
    [[nodiscard]] double signal_power() const { return harmonic_power(0); }
    [[nodiscard]] double idler_power() const;
    /// True when the k=0 and k=-1 harmonics land on the same physical frequency.
    [[nodiscard]] bool degenerate_coincidence() const;
    /// Power at the signal frequency with coinciding harmonics combined coherently.
    [[nodiscard]] double coherent_signal_power() const;
    /// Time-average load power of the full multi-tone steady state.
    [[nodiscard]] double total_average_power() const;

    double R_load = 50.0;
};

/// Solves the conversion system that couples mesh currents at f_s + k*f_p
/// through the capacitor's pump harmonics. gamma = 0 reduces to the static
/// single-tone response. Throws SolverError on an ill-conditioned system
/// (condition > 1e12, oscillation onset) or a harmonic too close to DC.
[[nodiscard]] ConversionResult conversion_matrix_solve(const MeshCircuit& m, double f_s, int K = 6,
                                                       double phi = 0.0, double amplitude = 1.0);

struct PowerSpectrum {
    std::vector<double> freq;       // Hz
    std::vector<double> P_signal;   // W
    std::vector<double> P_idler;    // W (0 when unpumped)
    std::vector<double> P_combined; // W, NaN where signal and idler do not coincide
    std::vector<std::string> errors; // per-point failures, empty entries when ok

    [[nodiscard]] double total(std::size_t i) const { return P_signal[i] + P_idler[i]; }
};

[[nodiscard]] PowerSpectrum received_power_sweep(const MeshCircuit& m, double f_lo, double f_hi,
                                                 int n_points, int K = 6, double phi = 0.0,
                                                 int jobs = 1);

/// -3 dB (or level_dB) fractional bandwidth of the received-power curve.
/// The curve is P_signal + P_idler; at an exact signal/idler coincidence
/// the coherent combination is used instead unless exclude_center_spike.
/// Band edges are interpolated linearly in dB. Throws std::runtime_error
/// when the level is never crossed inside the sweep.
[[nodiscard]] double fractional_bandwidth(const PowerSpectrum& s, double level_dB = -3.0,
                                          bool exclude_center_spike = false);

[[nodiscard]] inline double watts_to_dBW(double p) {
    return 10.0 * std::log10(p);
}

} // namespace plrx
