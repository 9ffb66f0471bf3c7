#include "plrx/mesh.hpp"

#include "plrx/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace plrx {

using cplx = std::complex<double>;

double MeshCircuit::voc_peak(double f) const {
    return 2.0 * kPi * std::abs(f) * area_over_c;
}

cplx MeshCircuit::trap_impedance(double f) const {
    const double w = 2.0 * kPi * f;
    const cplx zl(0.0, w * trap.L);
    const cplx zc = trap.R + cplx(0.0, -1.0 / (w * trap.C));
    return zl * zc / (zl + zc);
}

cplx MeshCircuit::port_section(double f) const {
    if (!has_mn) return {R_load_scaled, 0.0};
    const double w = 2.0 * kPi * f;
    // C_m' in parallel with R_load'
    return R_load_scaled / cplx(1.0, w * C_m_scaled * R_load_scaled);
}

cplx MeshCircuit::external_impedance(double f) const {
    const double w = 2.0 * kPi * f;
    return cplx(R_series, w * L_series) + trap_impedance(f) + port_section(f);
}

cplx MeshCircuit::load_transfer(double f) const {
    return port_section(f) / coupling;
}

MeshCircuit build_mesh(const AntennaEquivalent& ant, const ReceiverConfig& cfg) {
    cfg.validate(ant.geom.f_center);
    if (!(ant.L_a > 0.0)) throw std::invalid_argument("build_mesh: antenna has no inductance");

    MeshCircuit m;
    m.kind = cfg.kind;
    m.cap = cfg.cap;
    m.trap = ant.trap;
    m.f_ref = ant.geom.f_center;
    m.voc_per_vm = ant.voc_peak(m.f_ref);
    m.area_over_c = ant.geom.area() / kSpeedOfLight;
    m.coupling = std::sqrt(ant.port_coupling);
    m.R_load_physical = cfg.R_load;

    const double k2 = ant.port_coupling;
    m.L_series = ant.L_a;
    m.R_series = ant.series_resistance(m.f_ref);
    if (cfg.mn.present) {
        m.has_mn = true;
        m.L_series += k2 * cfg.mn.L_m;
        m.R_series += k2 * cfg.mn.series_loss(m.f_ref);
        m.C_m_scaled = cfg.mn.C_m / k2;
    }
    m.R_load_scaled = k2 * cfg.R_load;
    return m;
}

} // namespace plrx
