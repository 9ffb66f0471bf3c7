#include "plrx/transient.hpp"

#include "plrx/constants.hpp"
#include "plrx/freq_solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plrx {

namespace {

struct StateModel {
    int N = 0;
    bool mn = false;
    double Lser = 0.0, Rser = 0.0, Rc = 0.0;
    double Lt = 0.0, Ct = 0.0, Rt = 0.0;
    double Cm = 0.0, Rlp = 0.0;
    double C0 = 0.0, gamma = 0.0, wp = 0.0, pphase = 0.0;
    double coupling = 1.0;

    explicit StateModel(const MeshCircuit& m) {
        mn = m.has_mn;
        N = mn ? 5 : 4;
        Lser = m.L_series;
        Rser = m.R_series + m.cap.R_c + (mn ? 0.0 : m.R_load_scaled);
        Rc = m.cap.R_c;
        Lt = m.trap.L; Ct = m.trap.C; Rt = m.trap.R;
        Cm = m.C_m_scaled; Rlp = m.R_load_scaled;
        C0 = m.cap.C0; gamma = m.cap.gamma;
        wp = 2.0 * kPi * m.cap.f_p; pphase = m.cap.pump_phase;
        coupling = m.coupling;
    }

    [[nodiscard]] double cap_at(double t) const {
        if (gamma == 0.0) return C0;
        return C0 * (1.0 + gamma * std::sin(wp * t + pphase));
    }

    // A(t) = A0 + e0 e3^T * g(t) with g capturing the pump modulation.
    [[nodiscard]] Eigen::MatrixXd base_matrix() const {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
        A(0, 0) = -(Rser + Rt) / Lser;
        A(0, 1) = Rt / Lser;
        A(0, 2) = -1.0 / Lser;
        A(0, 3) = -1.0 / (Lser * C0);
        if (mn) A(0, 4) = -1.0 / Lser;
        A(1, 0) = Rt / Lt;
        A(1, 1) = -Rt / Lt;
        A(1, 2) = 1.0 / Lt;
        A(2, 0) = 1.0 / Ct;
        A(2, 1) = -1.0 / Ct;
        A(3, 0) = 1.0;
        if (mn) {
            A(4, 0) = 1.0 / Cm;
            A(4, 4) = -1.0 / (Cm * Rlp);
        }
        return A;
    }

    [[nodiscard]] double g_of(double t) const {
        if (gamma == 0.0) return 0.0;
        return (1.0 / C0 - 1.0 / cap_at(t)) / Lser;
    }

    [[nodiscard]] double v_load(const Eigen::VectorXd& x) const {
        if (mn) return x(4) / coupling;
        return x(0) * Rlp / coupling;
    }
};

template <typename VocFn>
Waveform run(const MeshCircuit& m, double f_exc, VocFn&& voc, double t_end, double dt) {
    const double f_dyn = std::abs(f_exc) + (m.cap.gamma > 0.0 ? m.cap.f_p : 0.0);
    if (dt > 1.0 / (4.0 * f_dyn))
        throw SolverError("simulate: dt too coarse for the fastest mixing product");

    const StateModel sm(m);
    const int N = sm.N;
    const auto A0 = sm.base_matrix();
    const Eigen::MatrixXd Mb = Eigen::MatrixXd::Identity(N, N) - 0.5 * dt * A0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Mb);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(N);
    e0(0) = 1.0;
    const Eigen::VectorXd w0 = lu.solve(e0);

    // divergence reference: static response amplitude at the drive frequency
    double vref = 1e-6;
    try {
        vref = std::max(vref, std::abs(ac_response(m, f_exc).v_load));
    } catch (const std::exception&) {}
    const double vbound = 1e3 * vref;

    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    Waveform w;
    w.dt = dt;
    w.t_start = 0.0;
    w.v.resize(n + 1);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    w.v[0] = sm.v_load(x);
    double g_n = sm.g_of(0.0);
    double voc_n = voc(0.0);
    Eigen::VectorXd rhs(N), y(N);
    for (std::size_t s = 1; s <= n; ++s) {
        const double t1 = static_cast<double>(s) * dt;
        const double g_n1 = sm.g_of(t1);
        const double voc_n1 = voc(t1);
        // rhs = (I + dt/2 A(t_n)) x + dt/2 (b_n + b_{n+1})
        rhs = x + 0.5 * dt * (A0 * x);
        rhs(0) += 0.5 * dt * (g_n * x(3) + (voc_n + voc_n1) / sm.Lser);
        // Sherman-Morrison: (Mb - dt/2 g e0 e3^T)^{-1}
        y = lu.solve(rhs);
        const double alpha = 0.5 * dt * g_n1;
        x = y + w0 * (alpha * y(3) / (1.0 - alpha * w0(3)));
        w.v[s] = sm.v_load(x);
        g_n = g_n1;
        voc_n = voc_n1;
        if ((s & 1023) == 0 && std::abs(w.v[s]) > vbound)
            throw SolverError("simulate: divergence detected (parametric oscillation or timestep failure)");
    }
    return w;
}

} // namespace

double default_timestep(const MeshCircuit& m, double f_signal, int samples_per_cycle) {
    const double f_dyn = std::abs(f_signal) + (m.cap.gamma > 0.0 ? m.cap.f_p : 0.0);
    const double dt_bb = 1.0 / kBasebandRate;
    const auto n = static_cast<int>(std::ceil(dt_bb * samples_per_cycle * f_dyn));
    return dt_bb / std::max(n, 1);
}

Waveform simulate(const MeshCircuit& m, const Excitation& exc, double t_end, double dt) {
    const double w_c = 2.0 * kPi * exc.f;
    const double vpk = exc.amplitude * m.voc_peak(exc.f);
    const double t0 = exc.t0;
    const double phi = exc.phi;
    // Left-continuous step: the sample at the onset instant is still zero.
    // Keeps the discrete onset identical wherever t0 falls on the grid.
    const double thresh = 0.5 * dt;
    return run(m, exc.f,
               [=](double t) {
                   return (t - t0 > thresh) ? vpk * std::cos(w_c * (t - t0) + phi) : 0.0;
               },
               t_end, dt);
}

Waveform simulate(const MeshCircuit& m, const SymbolTrainExcitation& exc, double t_end, double dt) {
    for (const auto& p : exc.pulses) {
        const double cycles = exc.f * p.tau;
        if (std::abs(cycles - std::llround(cycles)) > 1e-6)
            throw std::invalid_argument("simulate: symbol start times must be integer carrier cycles");
    }
    const double w_c = 2.0 * kPi * exc.f;
    const double vpk = exc.amplitude * m.voc_peak(exc.f);
    const auto& pulses = exc.pulses;
    const double thresh = 0.5 * dt;
    // With integer-cycle starts the superposed train collapses to the
    // currently active symbol's carrier; boundary samples belong to the
    // outgoing symbol (left-continuous steps).
    auto voc = [&, thresh, idx = std::size_t{0}](double t) mutable {
        while (idx + 1 < pulses.size() && t - pulses[idx + 1].tau > thresh) ++idx;
        if (pulses.empty() || t - pulses[0].tau <= thresh) return 0.0;
        const auto& p = pulses[idx];
        return vpk * p.a * std::cos(w_c * t + p.phi);
    };
    return run(m, exc.f, voc, t_end, dt);
}

double steady_state_power(const Waveform& w, double R_load, double window) {
    const auto nwin = static_cast<std::size_t>(std::llround(window / w.dt));
    if (nwin == 0 || nwin > w.v.size())
        throw std::invalid_argument("steady_state_power: window exceeds waveform length");
    double acc = 0.0;
    for (std::size_t i = w.v.size() - nwin; i < w.v.size(); ++i) acc += w.v[i] * w.v[i];
    return acc / static_cast<double>(nwin) / R_load;
}

void write_waveform_csv(const Waveform& w, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_waveform_csv: cannot open " + path);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", w.dt);
    os << "# dt_s=" << buf << "\n";
    os << "t_s,v_load_V\n";
    for (std::size_t i = 0; i < w.v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", w.t_start + static_cast<double>(i) * w.dt);
        os << buf << ",";
        std::snprintf(buf, sizeof buf, "%.12g", w.v[i]);
        os << buf << "\n";
    }
}

} // namespace plrx
