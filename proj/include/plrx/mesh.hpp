#pragma once

#include "plrx/antenna.hpp"
#include "plrx/circuit.hpp"

#include <complex>

namespace plrx {

/// Single series mesh: open-circuit source, loop inductance and loss,
/// structural-resonance section, pumped capacitor branch, port-1
/// termination (load or matching network + load, scaled by the port
/// coupling). Every element value is frequency independent; antenna
/// resistances are sampled at f_center so the frequency-domain and
/// time-domain solvers integrate the identical network.
struct MeshCircuit {
    ReceiverKind kind = ReceiverKind::LTI;
    TimeVaryingCap cap;

    double L_series = 0.0;    // H, loop + scaled matching inductor
    double R_series = 0.0;    // ohm, antenna loss at f_ref + scaled L_m loss
    StructuralResonance trap;

    bool has_mn = false;
    double C_m_scaled = 0.0;  // F
    double R_load_scaled = 0.0; // ohm
    double coupling = 1.0;    // sqrt of the port-1 impedance scale
    double R_load_physical = 50.0;

    double f_ref = 100e6;
    double voc_per_vm = 0.0;  // V peak per 1 V/m at f_ref
    double area_over_c = 0.0; // loop area / c, sets voc scaling with f

    /// Peak open-circuit voltage at frequency f for 1 V/m.
    [[nodiscard]] double voc_peak(double f) const;

    /// Impedance of the structural-resonance section.
    [[nodiscard]] std::complex<double> trap_impedance(double f) const;

    /// Scaled load-section impedance: R_load' alone, or C_m' || R_load'.
    [[nodiscard]] std::complex<double> port_section(double f) const;

    /// Series mesh impedance excluding the capacitor branch.
    [[nodiscard]] std::complex<double> external_impedance(double f) const;

    /// Physical load voltage per unit mesh current at f.
    [[nodiscard]] std::complex<double> load_transfer(double f) const;
};

[[nodiscard]] MeshCircuit build_mesh(const AntennaEquivalent& ant, const ReceiverConfig& cfg);

} // namespace plrx
