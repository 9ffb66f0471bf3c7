#pragma once

#include "plrx/mesh.hpp"
#include "plrx/transient.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace plrx {

struct ComplexBaseband {
    double dt = 0.0;   // s
    double f_c = 0.0;  // carrier used for downconversion
    std::vector<std::complex<double>> y;

    [[nodiscard]] double sample_rate() const { return 1.0 / dt; }
};

/// Mix by 2*exp(-j*2*pi*f_c*t), low-pass (linear-phase windowed sinc,
/// group delay compensated) and decimate onto the common 128 MS/s grid.
/// Output sample i sits at t = i/128 MHz, aligned with the input origin.
[[nodiscard]] ComplexBaseband downconvert(const Waveform& w, double f_c, double cutoff = 32e6);

/// Further decimation to 16 samples per symbol. 16 * rate must divide
/// the 128 MS/s grid.
[[nodiscard]] ComplexBaseband decimate_to_symbol_grid(const ComplexBaseband& bb,
                                                      double symbol_rate);

// ---- constellation -------------------------------------------------------

/// Gray-mapped 16QAM, unit mean-square amplitude.
[[nodiscard]] const std::array<std::complex<double>, 16>& qam16_constellation();

/// The distinct constellation phases folded into [0, pi); 6 values.
[[nodiscard]] std::vector<double> qam16_phases_mod_pi();

struct SymbolSequence {
    std::uint64_t seed = 1;
    std::vector<std::uint8_t> indices;
    std::vector<std::complex<double>> symbols;

    [[nodiscard]] std::size_t size() const { return symbols.size(); }
};

/// Deterministic PRBS of 16QAM symbols (31-bit LFSR, 4 bits/symbol).
[[nodiscard]] SymbolSequence prbs_symbols(std::uint64_t seed, std::size_t n);

// ---- step-response library ------------------------------------------------

struct StepResponseLibrary {
    ReceiverKind kind = ReceiverKind::LTI;
    double f_c = 0.0;
    double dt = 0.0;                    // 1/128 MHz
    std::vector<double> phases;         // grid in [0, pi)
    std::vector<std::vector<std::complex<double>>> entries;
    std::vector<std::complex<double>> tails; // settled values per entry

    /// Index and sign for an arbitrary phase via y(phi + pi) = -y(phi).
    /// Throws std::out_of_range when the phase is not on the grid.
    [[nodiscard]] std::pair<double, std::size_t> lookup(double phi) const;

    /// Largest relative magnitude spread across phases for t >= t_gate,
    /// normalized to the overall peak magnitude.
    [[nodiscard]] double magnitude_spread(double t_gate) const;

    /// Ratio of the largest to smallest settled magnitude across phases.
    [[nodiscard]] double tail_ratio() const;
};

/// One transient simulation + downconversion per grid phase.
/// samples_per_cycle controls the integration density.
[[nodiscard]] StepResponseLibrary build_step_library(const MeshCircuit& m, double f_c,
                                                     double t_lib = 8e-6,
                                                     int samples_per_cycle = 128,
                                                     const std::vector<double>* phase_grid = nullptr,
                                                     int jobs = 1);

// ---- synthesis, noise, equalization ---------------------------------------

/// Superposition of weighted, shifted library responses for the symbol
/// train; output on the 16-per-symbol grid with `guard_symbols` of extra
/// tail so downstream windows stay in range.
[[nodiscard]] ComplexBaseband synthesize_response(const StepResponseLibrary& lib,
                                                  const SymbolSequence& seq, double symbol_rate,
                                                  double amplitude = 1.0, int guard_symbols = 8);

/// Adds independent complex Gaussian noise, variance = noise_density *
/// sample_rate per sample. Deterministic for a given seed.
[[nodiscard]] ComplexBaseband add_awgn(const ComplexBaseband& bb, double noise_density,
                                       std::uint64_t seed);

struct EqualizerState {
    Eigen::VectorXcd taps;
    int decim = 16;
    int delay = 64;
    double mu = 0.5;
    double input_scale = 1.0;
    int epochs_run = 0;
    std::vector<double> mse_windows; // windowed MSE trace (256-symbol windows)
};

/// Data-aided normalized-LMS, symbol-spaced error, 16-to-1 decimating
/// 128-tap filter trained until the windowed MSE settles. Throws
/// SolverError when the error diverges (step size rejected).
[[nodiscard]] EqualizerState train_equalizer(const ComplexBaseband& bb16,
                                             const SymbolSequence& seq, int taps = 128,
                                             int decim = 16, double mu = 0.5,
                                             int max_epochs = 50);

/// Equalizer output for the first n symbols; entries whose input window
/// is out of range are zero (callers skip them via `first_valid`).
[[nodiscard]] std::vector<std::complex<double>> equalize(const ComplexBaseband& bb16,
                                                         const EqualizerState& eq, std::size_t n);

[[nodiscard]] std::size_t equalizer_first_valid(const EqualizerState& eq);

/// RMS error-vector magnitude in percent, skipping the first `skip` symbols.
[[nodiscard]] double evm_percent(const std::vector<std::complex<double>>& rx,
                                 const std::vector<std::complex<double>>& ref, std::size_t skip);

/// Mean |y|^2 from sample `from` (signal-power measurements for SNR).
[[nodiscard]] double mean_power(const ComplexBaseband& bb, std::size_t from = 0);

} // namespace plrx
