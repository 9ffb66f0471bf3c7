#pragma once

#include "plrx/circuit.hpp"

namespace plrx {

/// Square printed loop, two feed gaps at the centers of opposite sides.
struct LoopGeometry {
    double outer_side = 0.150;    // m
    double trace_width = 0.003;   // m
    double conductivity = 5.7e7;  // S/m
    double f_center = 100e6;      // Hz

    void validate() const;

    [[nodiscard]] double mean_side() const { return outer_side - trace_width; }
    [[nodiscard]] double area() const { return mean_side() * mean_side(); }
    [[nodiscard]] double perimeter() const { return 4.0 * mean_side(); }
    /// Electrical size k*a with a the mean circumscribing radius.
    [[nodiscard]] double ka(double f) const;
};

/// Parallel L / (C + R) section in series with the loop conductor.
/// Captures the loop's first structural resonance above the operating
/// band; its loss models the strong radiation of that mode.
struct StructuralResonance {
    double L = 60e-9;   // H
    double C = 1.3e-12; // F
    double R = 2.0;     // ohm, in series with C
};

/// Lumped receive-mode equivalent of the loop: series inductance,
/// frequency-law resistances, open-circuit voltage per 1 V/m incident
/// field, plus the collapse parameters for the two-port reduction.
struct AntennaEquivalent {
    LoopGeometry geom;
    double L_a = 0.0;            // H, series loop inductance
    StructuralResonance trap;
    /// Impedance scale applied to the port-1 termination when the
    /// two-port loop is collapsed to one mesh. Accounts for the current
    /// distribution ratio between the two gap locations; 1 = uniform.
    double port_coupling = 1.0;
    double directivity = 1.5;

    [[nodiscard]] double radiation_resistance(double f) const;  // ~ f^4
    [[nodiscard]] double conduction_resistance(double f) const; // ~ sqrt(f)
    [[nodiscard]] double series_resistance(double f) const;
    /// Peak open-circuit voltage for a 1 V/m copolarized broadside plane wave.
    [[nodiscard]] double voc_peak(double f) const;
    [[nodiscard]] double radiation_efficiency(double f) const;
};

/// Closed-form equivalent circuit from the geometry. The structural
/// resonance section and port coupling start at neutral values; see
/// calibrate.hpp for how they are fixed against the loading table.
[[nodiscard]] AntennaEquivalent loop_equivalent(const LoopGeometry& geom);

} // namespace plrx
