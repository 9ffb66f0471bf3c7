#pragma once

#include <complex>
#include <vector>

namespace plrx {

/// Sinusoidally pumped capacitance C(t) = C0 * (1 + gamma * sin(2*pi*f_p*t + pump_phase))
/// with series loss R_c. gamma = 0 degenerates to a static capacitor.
struct TimeVaryingCap {
    double C0 = 0.0;          // F
    double gamma = 0.0;       // modulation factor, [0, 1)
    double f_p = 0.0;         // pump frequency, Hz
    double R_c = 0.0;         // series loss, ohm
    double pump_phase = 0.0;  // rad

    void validate() const;

    [[nodiscard]] double capacitance_at(double t) const;

    /// Complex Fourier coefficients c_k of C(t) on the pump frequency,
    /// k = -K..K stored at index k + K. Only c_0 and c_{+-1} are nonzero.
    [[nodiscard]] std::vector<std::complex<double>> harmonics(int K) const;
};

/// L-section match: series L_m from the antenna port toward the load,
/// shunt C_m across the load. Inductor loss follows a fixed Q at f_ref.
struct MatchingNetwork {
    bool present = false;
    double L_m = 0.0;        // H
    double C_m = 0.0;        // F
    double inductor_Q = 100.0;

    void validate() const;

    [[nodiscard]] double series_loss(double f_ref) const;
};

enum class ReceiverKind { LTI, DTV, NDTV };

[[nodiscard]] const char* to_string(ReceiverKind k);

struct ReceiverConfig {
    ReceiverKind kind = ReceiverKind::LTI;
    TimeVaryingCap cap;
    MatchingNetwork mn;
    double R_load = 50.0;    // ohm

    /// Enforces the per-kind constraints (static lossless cap for LTI,
    /// pump at exactly twice f_center for DTV, out-of-band idler for NDTV).
    void validate(double f_center) const;
};

[[nodiscard]] double idler_frequency(double f_s, double f_p);

// Canonical loading configurations.
[[nodiscard]] ReceiverConfig lti_config();
[[nodiscard]] ReceiverConfig dtv_config();
[[nodiscard]] ReceiverConfig ndtv_config();

} // namespace plrx
