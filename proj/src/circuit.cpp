#include "plrx/circuit.hpp"

#include "plrx/constants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace plrx {

void TimeVaryingCap::validate() const {
    if (!(C0 > 0.0)) throw std::invalid_argument("TimeVaryingCap: C0 must be positive");
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("TimeVaryingCap: gamma must lie in [0, 1)");
    if (R_c < 0.0) throw std::invalid_argument("TimeVaryingCap: R_c must be non-negative");
    if (gamma > 0.0 && !(f_p > 0.0))
        throw std::invalid_argument("TimeVaryingCap: pumped capacitor needs f_p > 0");
}

double TimeVaryingCap::capacitance_at(double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("capacitance_at: t must be finite");
    if (gamma == 0.0) return C0;
    return C0 * (1.0 + gamma * std::sin(2.0 * kPi * f_p * t + pump_phase));
}

std::vector<std::complex<double>> TimeVaryingCap::harmonics(int K) const {
    if (K < 1) throw std::invalid_argument("harmonics: K must be >= 1");
    std::vector<std::complex<double>> c(2 * K + 1, {0.0, 0.0});
    c[K] = {C0, 0.0};
    if (gamma != 0.0) {
        // sin pump with phase: c_{+1} = gamma*C0/(2j) * e^{+j*pump_phase}
        const std::complex<double> half(0.0, -0.5 * gamma * C0);
        const std::complex<double> rot = std::polar(1.0, pump_phase);
        c[K + 1] = half * rot;
        c[K - 1] = std::conj(c[K + 1]);
    }
    return c;
}

void MatchingNetwork::validate() const {
    if (!present) return;
    if (!(L_m > 0.0) || !(C_m > 0.0))
        throw std::invalid_argument("MatchingNetwork: L_m and C_m must be positive when present");
    if (!(inductor_Q > 0.0))
        throw std::invalid_argument("MatchingNetwork: inductor_Q must be positive");
}

double MatchingNetwork::series_loss(double f_ref) const {
    if (!present) return 0.0;
    return 2.0 * kPi * f_ref * L_m / inductor_Q;
}

const char* to_string(ReceiverKind k) {
    switch (k) {
        case ReceiverKind::LTI: return "LTI";
        case ReceiverKind::DTV: return "DTV";
        case ReceiverKind::NDTV: return "NDTV";
    }
    return "?";
}

void ReceiverConfig::validate(double f_center) const {
    cap.validate();
    mn.validate();
    if (!(R_load > 0.0)) throw std::invalid_argument("ReceiverConfig: R_load must be positive");
    switch (kind) {
        case ReceiverKind::LTI:
            if (cap.gamma != 0.0 || cap.R_c != 0.0)
                throw std::invalid_argument("LTI config requires gamma = 0 and R_c = 0");
            break;
        case ReceiverKind::DTV:
            if (mn.present)
                throw std::invalid_argument("DTV config uses no matching network");
            if (cap.f_p != 2.0 * f_center)
                throw std::invalid_argument("DTV config requires f_p = 2 * f_center exactly");
            break;
        case ReceiverKind::NDTV: {
            const double fi = idler_frequency(f_center, cap.f_p);
            if (std::abs(fi - f_center) < 0.1 * f_center)
                throw std::invalid_argument("NDTV config requires the idler well outside the passband");
            break;
        }
    }
}

double idler_frequency(double f_s, double f_p) {
    if (!(f_s > 0.0) || !(f_p > 0.0))
        throw std::invalid_argument("idler_frequency: frequencies must be positive");
    return std::abs(f_s - f_p);
}

ReceiverConfig lti_config() {
    ReceiverConfig c;
    c.kind = ReceiverKind::LTI;
    c.cap = {4.0e-12, 0.0, 0.0, 0.0, 0.0};
    c.mn = {true, 9e-9, 277e-12, 100.0};
    return c;
}

ReceiverConfig dtv_config() {
    ReceiverConfig c;
    c.kind = ReceiverKind::DTV;
    c.cap = {4.1e-12, 0.332, 200e6, 0.8, 0.0};
    c.mn.present = false;
    return c;
}

ReceiverConfig ndtv_config() {
    ReceiverConfig c;
    c.kind = ReceiverKind::NDTV;
    c.cap = {4.2e-12, 0.332, 669e6, 0.8, 0.0};
    c.mn = {true, 27e-9, 95e-12, 100.0};
    return c;
}

} // namespace plrx
