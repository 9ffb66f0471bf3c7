#pragma once

#include "plrx/antenna.hpp"
#include "plrx/circuit.hpp"

#include <string>

namespace plrx {

/// Design anchors for the family calibration. The two bandwidth anchors
/// pin the pumped operating points that the loading table alone cannot
/// convey through the analytic antenna substitute.
struct CalibrationTargets {
    double dtv_fractional_bw = 0.020;
    double ndtv_fractional_bw = 0.0105;
    double center_tolerance = 1e-3;   // relative, NDTV passband centering
    double bw_tolerance = 4e-3;       // relative, on both bandwidth anchors
};

struct CalibrationReport {
    double la_scale = 0.0;        // applied to the closed-form inductance
    double lti_residual_reactance = 0.0; // ohm at f_center
    double dtv_fractional_bw = 0.0;
    double ndtv_fractional_bw = 0.0;
    double ndtv_center_offset = 0.0;     // relative to f_center
    double ndtv_idler_frequency = 0.0;   // Hz
    std::string summary() const;
};

/// Scales L_a so the static mesh of `cfg` resonates at exactly
/// geom.f_center. Returns the adjusted copy; other antenna fields are
/// untouched. Throws if no positive scaling achieves resonance.
[[nodiscard]] AntennaEquivalent calibrate_resonance(const AntennaEquivalent& ant,
                                                    const ReceiverConfig& cfg);

/// Full family calibration against the three canonical loading
/// configurations: L_a for LTI resonance, the structural-resonance
/// section for the NDTV idler resonance and passband centering, the
/// port coupling and section loss for the two pumped operating points.
/// Deterministic; throws on infeasibility.
[[nodiscard]] AntennaEquivalent calibrate_receiver_family(const AntennaEquivalent& ant,
                                                          const ReceiverConfig& lti,
                                                          const ReceiverConfig& dtv,
                                                          const ReceiverConfig& ndtv,
                                                          const CalibrationTargets& targets = {},
                                                          CalibrationReport* report = nullptr);

/// Calibrated antenna for the canonical table, memoized per process.
[[nodiscard]] const AntennaEquivalent& default_calibrated_antenna();

} // namespace plrx
