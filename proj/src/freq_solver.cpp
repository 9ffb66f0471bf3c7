#include "plrx/freq_solver.hpp"

#include "plrx/constants.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>

namespace plrx {

using cplx = std::complex<double>;

namespace {

constexpr double kConditionLimit = 1e12;

cplx source_phasor(const MeshCircuit& m, double f, double amplitude, double phi) {
    // step-carrier excitation amplitude * voc(f) * cos(w t + phi)
    return std::polar(amplitude * m.voc_peak(f), phi);
}

} // namespace

AcResponse ac_response(const MeshCircuit& m, double f, double amplitude, double phi) {
    const double w = 2.0 * kPi * f;
    if (std::abs(w) < 1.0) throw SolverError("ac_response: frequency too close to DC");
    const cplx zc = m.cap.R_c + cplx(0.0, -1.0 / (w * m.cap.C0));
    const cplx z = m.external_impedance(f) + zc;
    if (std::abs(z) == 0.0) throw SolverError("ac_response: singular mesh impedance at f=" + std::to_string(f));
    const cplx i = source_phasor(m, f, amplitude, phi) / z;
    AcResponse r;
    r.v_load = i * m.load_transfer(f);
    r.power = std::norm(r.v_load) / (2.0 * m.R_load_physical);
    return r;
}

double ConversionResult::harmonic_power(int k) const {
    return std::norm(v_load_k[idx(k)]) / (2.0 * R_load);
}

double ConversionResult::idler_power() const {
    if (f_pump <= 0.0) return 0.0;
    return harmonic_power(-1);
}

bool ConversionResult::degenerate_coincidence() const {
    if (f_pump <= 0.0) return false;
    return std::abs(std::abs(f_k[idx(-1)]) - std::abs(f_signal)) < 1e-3;
}

double ConversionResult::coherent_signal_power() const {
    cplx v = v_load_k[idx(0)];
    if (degenerate_coincidence()) {
        const cplx vi = v_load_k[idx(-1)];
        v += (f_k[idx(-1)] >= 0.0) ? vi : std::conj(vi);
    }
    return std::norm(v) / (2.0 * R_load);
}

double ConversionResult::total_average_power() const {
    const std::size_t n = f_k.size();
    std::vector<bool> used(n, false);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        cplx v = (f_k[i] >= 0.0) ? v_load_k[i] : std::conj(v_load_k[i]);
        const double fi = std::abs(f_k[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!used[j] && std::abs(std::abs(f_k[j]) - fi) < 1e-3) {
                v += (f_k[j] >= 0.0) ? v_load_k[j] : std::conj(v_load_k[j]);
                used[j] = true;
            }
        }
        used[i] = true;
        total += std::norm(v) / (2.0 * R_load);
    }
    return total;
}

ConversionResult conversion_matrix_solve(const MeshCircuit& m, double f_s, int K, double phi,
                                         double amplitude) {
    if (K < 1) throw std::invalid_argument("conversion_matrix_solve: K must be >= 1");
    const int M = 2 * K + 1;
    const double f_p = (m.cap.gamma > 0.0) ? m.cap.f_p : 0.0;

    ConversionResult r;
    r.f_signal = f_s;
    r.f_pump = f_p;
    r.K = K;
    r.R_load = m.R_load_physical;
    r.f_k.resize(M);
    for (int k = -K; k <= K; ++k) r.f_k[k + K] = f_s + k * f_p;

    for (double fk : r.f_k)
        if (std::abs(fk) < 1.0)
            throw SolverError("conversion_matrix_solve: harmonic at DC (f_s multiple of f_p)");

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);
    const auto c = m.cap.harmonics(K);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M, M);
    for (int n = 0; n < M; ++n)
        for (int mm = 0; mm < M; ++mm) {
            const int d = n - mm;
            if (d >= -K && d <= K) C(n, mm) = c[d + K];
        }
    const Eigen::MatrixXcd Cinv = C.partialPivLu().inverse();

    for (int n = 0; n < M; ++n) {
        A(n, n) += m.external_impedance(r.f_k[n]) + m.cap.R_c;
        for (int mm = 0; mm < M; ++mm) {
            const double wm = 2.0 * kPi * r.f_k[mm];
            A(n, mm) += Cinv(n, mm) / cplx(0.0, wm);
        }
    }

    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    r.condition = 1.0 / std::max(lu.rcond(), 1e-300);
    if (!(r.condition < kConditionLimit))
        throw SolverError("conversion_matrix_solve: ill-conditioned harmonic system (condition " +
                          std::to_string(r.condition) + "), oscillation onset");

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(M);
    b(K) = source_phasor(m, f_s, amplitude, phi);
    const Eigen::VectorXcd I = lu.solve(b);

    // Oscillation screen: past the pump threshold the mesh presents a
    // negative driving-point resistance to the source.
    if (std::abs(I(K)) > 0.0) {
        const cplx z_drive = b(K) / I(K);
        if (z_drive.real() < 0.0)
            throw SolverError(
                "conversion_matrix_solve: negative driving-point resistance at f_s=" +
                std::to_string(f_s) + " Hz (parametric oscillation)");
    }

    r.I_k.resize(M);
    r.v_load_k.resize(M);
    for (int n = 0; n < M; ++n) {
        r.I_k[n] = I(n);
        r.v_load_k[n] = I(n) * m.load_transfer(r.f_k[n]);
    }
    return r;
}

PowerSpectrum received_power_sweep(const MeshCircuit& m, double f_lo, double f_hi, int n_points,
                                   int K, double phi, int jobs) {
    if (!(f_lo < f_hi)) throw std::invalid_argument("received_power_sweep: f_lo must be < f_hi");
    if (n_points < 2) throw std::invalid_argument("received_power_sweep: need at least 2 points");

    PowerSpectrum s;
    s.freq.resize(n_points);
    s.P_signal.assign(n_points, 0.0);
    s.P_idler.assign(n_points, 0.0);
    s.P_combined.assign(n_points, std::numeric_limits<double>::quiet_NaN());
    s.errors.assign(n_points, {});
    for (int i = 0; i < n_points; ++i)
        s.freq[i] = f_lo + (f_hi - f_lo) * i / (n_points - 1);

    auto eval = [&](int i) {
        try {
            const auto r = conversion_matrix_solve(m, s.freq[i], K, phi);
            s.P_signal[i] = r.signal_power();
            s.P_idler[i] = r.idler_power();
            if (r.degenerate_coincidence()) s.P_combined[i] = r.coherent_signal_power();
        } catch (const std::exception& e) {
            s.P_signal[i] = std::numeric_limits<double>::quiet_NaN();
            s.P_idler[i] = std::numeric_limits<double>::quiet_NaN();
            s.errors[i] = e.what();
        }
    };

    if (jobs <= 1) {
        for (int i = 0; i < n_points; ++i) eval(i);
    } else {
        std::vector<std::future<void>> fs;
        std::atomic<int> next{0};
        for (int t = 0; t < jobs; ++t)
            fs.push_back(std::async(std::launch::async, [&]() {
                for (int i = next.fetch_add(1); i < n_points; i = next.fetch_add(1)) eval(i);
            }));
        for (auto& f : fs) f.get();
    }
    return s;
}

double fractional_bandwidth(const PowerSpectrum& s, double level_dB, bool exclude_center_spike) {
    const int n = static_cast<int>(s.freq.size());
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) {
        p[i] = s.total(i);
        if (!exclude_center_spike && std::isfinite(s.P_combined[i])) p[i] = s.P_combined[i];
    }
    int pk = -1;
    double pmax = -1.0;
    for (int i = 0; i < n; ++i)
        if (std::isfinite(p[i]) && p[i] > pmax) { pmax = p[i]; pk = i; }
    if (pk < 0) throw std::runtime_error("fractional_bandwidth: no finite points");

    const double lev = watts_to_dBW(pmax) + level_dB;
    auto dB = [&](int i) { return watts_to_dBW(p[i]); };

    double f_lo = std::numeric_limits<double>::quiet_NaN();
    for (int i = pk; i > 0; --i) {
        if (dB(i - 1) < lev && lev <= dB(i)) {
            const double t = (lev - dB(i - 1)) / (dB(i) - dB(i - 1));
            f_lo = s.freq[i - 1] + t * (s.freq[i] - s.freq[i - 1]);
            break;
        }
    }
    double f_hi = std::numeric_limits<double>::quiet_NaN();
    for (int i = pk; i + 1 < n; ++i) {
        if (dB(i + 1) < lev && lev <= dB(i)) {
            const double t = (dB(i) - lev) / (dB(i) - dB(i + 1));
            f_hi = s.freq[i] + t * (s.freq[i + 1] - s.freq[i]);
            break;
        }
    }
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi))
        throw std::runtime_error("fractional_bandwidth: level not crossed within sweep range");
    return (f_hi - f_lo) / s.freq[pk];
}

} // namespace plrx
