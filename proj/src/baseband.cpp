#include "plrx/baseband.hpp"

#include "plrx/constants.hpp"
#include "plrx/freq_solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace plrx {

using cplx = std::complex<double>;

namespace {

std::vector<double> design_lowpass(double dt, double f_cut, double f_stop) {
    const double df = (f_stop - f_cut) * dt;
    if (df <= 0.0)
        throw std::invalid_argument("downconvert: filter transition band overlaps signal bandwidth");
    auto ntaps = static_cast<std::size_t>(std::ceil(5.5 / df)) | 1u;
    std::vector<double> h(ntaps);
    const double fmid = 0.5 * (f_cut + f_stop) * dt;
    const auto mid = static_cast<double>(ntaps - 1) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < ntaps; ++i) {
        const double n = static_cast<double>(i) - mid;
        const double x = 2.0 * fmid * n;
        const double sinc = (x == 0.0) ? 1.0 : std::sin(kPi * x) / (kPi * x);
        const double wnd = 0.42 - 0.5 * std::cos(2.0 * kPi * i / (ntaps - 1)) +
                           0.08 * std::cos(4.0 * kPi * i / (ntaps - 1));
        h[i] = 2.0 * fmid * sinc * wnd;
        sum += h[i];
    }
    for (auto& v : h) v /= sum;
    return h;
}

// splitmix64 stream; bit-reproducible across platforms
struct Splitmix64 {
    std::uint64_t s;
    explicit Splitmix64(std::uint64_t seed) : s(seed ^ 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
};

struct GaussianRng {
    Splitmix64 rng;
    explicit GaussianRng(std::uint64_t seed) : rng(seed) {}
    cplx pair() {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
    }
};

} // namespace

ComplexBaseband downconvert(const Waveform& w, double f_c, double cutoff) {
    if (w.dt <= 0.0 || w.v.empty()) throw std::invalid_argument("downconvert: empty waveform");
    if (1.0 / w.dt <= 4.0 * f_c)
        throw std::invalid_argument("downconvert: waveform sample rate must exceed 4*f_c");
    const double dt_bb = 1.0 / kBasebandRate;
    const double ratio = dt_bb / w.dt;
    const auto dec = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(dec)) > 1e-6)
        throw std::invalid_argument("downconvert: waveform rate must be an integer multiple of 128 MS/s");

    const auto h = design_lowpass(w.dt, cutoff, kBasebandRate / 2.0);
    const std::size_t T = h.size();
    const std::size_t gd = (T - 1) / 2;

    // front-pad with the pre-onset zeros so outputs land on t = i/128MHz
    std::vector<cplx> arr(gd + w.v.size());
    const double wc = 2.0 * kPi * f_c;
    for (std::size_t i = 0; i < w.v.size(); ++i) {
        const double t = w.t_start + static_cast<double>(i) * w.dt;
        arr[gd + i] = 2.0 * w.v[i] * std::polar(1.0, -wc * t);
    }

    ComplexBaseband bb;
    bb.dt = dt_bb;
    bb.f_c = f_c;
    const std::size_t last_base = arr.size() - 1;
    for (std::size_t i = 0;; ++i) {
        const std::size_t base = i * dec + 2 * gd;
        if (base > last_base) break;
        cplx acc{0.0, 0.0};
        const cplx* a = arr.data() + (base - T + 1);
        for (std::size_t k = 0; k < T; ++k) acc += h[k] * a[T - 1 - k];
        bb.y.push_back(acc);
    }
    if (bb.y.empty()) throw std::invalid_argument("downconvert: waveform shorter than the filter");
    return bb;
}

ComplexBaseband decimate_to_symbol_grid(const ComplexBaseband& bb, double symbol_rate) {
    const double stride_f = bb.sample_rate() / (16.0 * symbol_rate);
    const auto stride = static_cast<std::size_t>(std::llround(stride_f));
    if (stride < 1 || std::abs(stride_f - static_cast<double>(stride)) > 1e-9)
        throw std::invalid_argument("decimate_to_symbol_grid: 16*rate must divide the baseband rate");
    ComplexBaseband out;
    out.dt = bb.dt * static_cast<double>(stride);
    out.f_c = bb.f_c;
    out.y.reserve(bb.y.size() / stride + 1);
    for (std::size_t i = 0; i < bb.y.size(); i += stride) out.y.push_back(bb.y[i]);
    return out;
}

const std::array<cplx, 16>& qam16_constellation() {
    static const std::array<cplx, 16> table = [] {
        std::array<cplx, 16> t{};
        // 2-bit Gray code to amplitude level
        const double lv[4] = {-3.0, -1.0, 1.0, 3.0};
        const int gray[4] = {0, 1, 3, 2}; // bits -> level index
        const double norm = 1.0 / std::sqrt(10.0);
        for (int b = 0; b < 16; ++b) {
            const int bi = (b >> 2) & 3, bq = b & 3;
            int li = 0, lq = 0;
            for (int g = 0; g < 4; ++g) {
                if (gray[g] == bi) li = g;
                if (gray[g] == bq) lq = g;
            }
            t[b] = cplx(lv[li], lv[lq]) * norm;
        }
        return t;
    }();
    return table;
}

std::vector<double> qam16_phases_mod_pi() {
    std::vector<double> ph;
    for (const auto& s : qam16_constellation()) {
        double p = std::arg(s);
        p = std::fmod(p + 2.0 * kPi, kPi);
        if (p > kPi - 1e-9) p = 0.0;
        bool found = false;
        for (double q : ph)
            if (std::abs(q - p) < 1e-9) { found = true; break; }
        if (!found) ph.push_back(p);
    }
    std::sort(ph.begin(), ph.end());
    return ph;
}

SymbolSequence prbs_symbols(std::uint64_t seed, std::size_t n) {
    if (n < 1) throw std::invalid_argument("prbs_symbols: n must be >= 1");
    SymbolSequence s;
    s.seed = seed;
    s.indices.reserve(n);
    s.symbols.reserve(n);
    Splitmix64 rng(seed);
    const auto& table = qam16_constellation();
    std::uint64_t bits = 0;
    int avail = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (avail < 4) {
            bits = rng.next();
            avail = 64;
        }
        const int idx = static_cast<int>(bits & 0xf);
        bits >>= 4;
        avail -= 4;
        s.indices.push_back(static_cast<std::uint8_t>(idx));
        s.symbols.push_back(table[static_cast<std::size_t>(idx)]);
    }
    return s;
}

std::pair<double, std::size_t> StepResponseLibrary::lookup(double phi) const {
    double p = std::fmod(phi, 2.0 * kPi);
    if (p < 0.0) p += 2.0 * kPi;
    double sign = 1.0;
    if (p >= kPi - 1e-9) {
        p -= kPi;
        sign = -1.0;
    }
    if (p < 0.0) p = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i)
        if (std::abs(phases[i] - p) < 1e-6) return {sign, i};
    throw std::out_of_range("StepResponseLibrary: phase not on the stored grid");
}

double StepResponseLibrary::magnitude_spread(double t_gate) const {
    if (entries.empty()) return 0.0;
    const auto i0 = static_cast<std::size_t>(std::ceil(t_gate / dt));
    const std::size_t n = entries.front().size();
    double peak = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lo = 1e300, hi = 0.0;
        for (const auto& e : entries) {
            const double a = std::abs(e[i]);
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        peak = std::max(peak, hi);
        if (i >= i0) spread = std::max(spread, hi - lo);
    }
    return spread / peak;
}

double StepResponseLibrary::tail_ratio() const {
    double lo = 1e300, hi = 0.0;
    for (const auto& t : tails) {
        lo = std::min(lo, std::abs(t));
        hi = std::max(hi, std::abs(t));
    }
    return hi / lo;
}

StepResponseLibrary build_step_library(const MeshCircuit& m, double f_c, double t_lib,
                                       int samples_per_cycle, const std::vector<double>* phase_grid,
                                       int jobs) {
    StepResponseLibrary lib;
    lib.kind = m.kind;
    lib.f_c = f_c;
    lib.dt = 1.0 / kBasebandRate;
    lib.phases = phase_grid ? *phase_grid : qam16_phases_mod_pi();
    lib.entries.resize(lib.phases.size());
    lib.tails.resize(lib.phases.size());

    const double dt = default_timestep(m, f_c, samples_per_cycle);
    auto build_one = [&](std::size_t i) {
        Excitation exc;
        exc.f = f_c;
        exc.phi = lib.phases[i];
        const Waveform w = simulate(m, exc, t_lib, dt);
        lib.entries[i] = downconvert(w, f_c).y;
        const auto& y = lib.entries[i];
        const std::size_t navg = std::min<std::size_t>(32, y.size());
        cplx acc{0.0, 0.0};
        for (std::size_t k = y.size() - navg; k < y.size(); ++k) acc += y[k];
        lib.tails[i] = acc / static_cast<double>(navg);
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < lib.phases.size(); ++i) build_one(i);
    } else {
        std::vector<std::future<void>> fs;
        for (std::size_t i = 0; i < lib.phases.size(); ++i)
            fs.push_back(std::async(std::launch::async, build_one, i));
        for (auto& f : fs) f.get();
    }
    return lib;
}

ComplexBaseband synthesize_response(const StepResponseLibrary& lib, const SymbolSequence& seq,
                                    double symbol_rate, double amplitude, int guard_symbols) {
    const double stride_f = kBasebandRate / (16.0 * symbol_rate);
    const auto stride = static_cast<std::size_t>(std::llround(stride_f));
    if (stride < 1 || std::abs(stride_f - static_cast<double>(stride)) > 1e-9)
        throw std::invalid_argument("synthesize_response: 16*rate must divide 128 MS/s");

    const std::size_t n_sym = seq.size();
    const std::size_t n_out = (n_sym + static_cast<std::size_t>(guard_symbols)) * 16;
    ComplexBaseband out;
    out.dt = 1.0 / (16.0 * symbol_rate);
    out.f_c = lib.f_c;
    out.y.assign(n_out, cplx{0.0, 0.0});
    std::vector<cplx> tail_delta(n_out + 1, cplx{0.0, 0.0});

    auto add_term = [&](std::size_t n_start, double a, double phi, double scale) {
        if (a == 0.0) return;
        const auto [sign, idx] = lib.lookup(phi);
        const auto& y = lib.entries[idx];
        const cplx fac = scale * a * sign;
        const std::size_t q0 = n_start * 16;
        std::size_t q = q0;
        for (; q < n_out; ++q) {
            const std::size_t j = (q - q0) * stride;
            if (j >= y.size()) break;
            out.y[q] += fac * y[j];
        }
        if (q < n_out + 1) tail_delta[q] += fac * lib.tails[idx];
    };

    double a_prev = 0.0, phi_prev = 0.0; // a_0 = 0 boundary
    for (std::size_t n = 0; n < n_sym; ++n) {
        const double a_n = std::abs(seq.symbols[n]);
        const double phi_n = std::arg(seq.symbols[n]);
        add_term(n, a_n, phi_n, amplitude);
        add_term(n, a_prev, phi_prev, -amplitude);
        a_prev = a_n;
        phi_prev = phi_n;
    }
    cplx level{0.0, 0.0};
    for (std::size_t q = 0; q < n_out; ++q) {
        level += tail_delta[q];
        out.y[q] += level;
    }
    return out;
}

ComplexBaseband add_awgn(const ComplexBaseband& bb, double noise_density, std::uint64_t seed) {
    if (noise_density < 0.0) throw std::invalid_argument("add_awgn: noise_density must be >= 0");
    ComplexBaseband out = bb;
    if (noise_density == 0.0) return out;
    const double sigma = std::sqrt(noise_density * bb.sample_rate());
    GaussianRng rng(seed);
    const double s = sigma / std::sqrt(2.0);
    for (auto& v : out.y) v += s * rng.pair();
    return out;
}

EqualizerState train_equalizer(const ComplexBaseband& bb16, const SymbolSequence& seq, int taps,
                               int decim, double mu, int max_epochs) {
    if (taps < 2) throw std::invalid_argument("train_equalizer: taps must be >= 2");
    const std::size_t n_sym = seq.size();
    const std::size_t n_in = bb16.y.size();

    EqualizerState eq;
    eq.taps = Eigen::VectorXcd::Zero(taps);
    eq.decim = decim;
    eq.delay = taps / 2;
    eq.mu = mu;

    double rms = 0.0;
    for (const auto& v : bb16.y) rms += std::norm(v);
    rms = std::sqrt(rms / static_cast<double>(n_in));
    eq.input_scale = (rms > 0.0) ? rms : 1.0;

    std::vector<cplx> u(n_in);
    for (std::size_t i = 0; i < n_in; ++i) u[i] = bb16.y[i] / eq.input_scale;

    // gain seed from the end-of-symbol samples
    cplx num{0.0, 0.0}, den{0.0, 0.0};
    for (std::size_t nsy = 16; nsy < n_sym; ++nsy) {
        const std::size_t i = nsy * decim + (decim - 1);
        if (i >= n_in) break;
        num += std::conj(seq.symbols[nsy]) * u[i];
        den += std::conj(seq.symbols[nsy]) * seq.symbols[nsy];
    }
    const cplx g = (std::abs(den) > 0.0) ? num / den : cplx{1.0, 0.0};
    const int seed_tap = eq.delay - (decim - 1);
    if (std::abs(g) > 1e-9 && seed_tap >= 0) eq.taps(seed_tap) = 1.0 / g;

    const std::size_t window = 256;
    double prev_window_mse = -1.0;
    int grow_streak = 0;
    bool converged = false;

    for (int ep = 0; ep < max_epochs && !converged; ++ep) {
        eq.epochs_run = ep + 1;
        double werr = 0.0;
        std::size_t wcnt = 0;
        for (std::size_t nsy = 0; nsy < n_sym; ++nsy) {
            const std::size_t center = nsy * decim + eq.delay;
            if (center + 1 < static_cast<std::size_t>(taps) || center >= n_in) continue;
            cplx yhat{0.0, 0.0};
            const cplx* base = u.data() + (center - taps + 1);
            double p = 0.0;
            for (int k = 0; k < taps; ++k) {
                const cplx& xi = base[taps - 1 - k];
                yhat += eq.taps(k) * xi;
                p += std::norm(xi);
            }
            const cplx e = seq.symbols[nsy] - yhat;
            const cplx step = mu * e / (p + 1e-12);
            for (int k = 0; k < taps; ++k) eq.taps(k) += step * std::conj(base[taps - 1 - k]);
            werr += std::norm(e);
            if (++wcnt == window) {
                const double mse = werr / static_cast<double>(window);
                eq.mse_windows.push_back(mse);
                if (prev_window_mse > 0.0) {
                    if (mse > 2.0 * prev_window_mse) {
                        if (++grow_streak >= 4)
                            throw SolverError("train_equalizer: error increasing; step size rejected");
                    } else {
                        grow_streak = 0;
                    }
                    if (std::abs(mse - prev_window_mse) < 1e-4 * prev_window_mse) {
                        converged = true;
                        break;
                    }
                }
                prev_window_mse = mse;
                werr = 0.0;
                wcnt = 0;
            }
        }
    }
    return eq;
}

std::vector<cplx> equalize(const ComplexBaseband& bb16, const EqualizerState& eq, std::size_t n) {
    const int taps = static_cast<int>(eq.taps.size());
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    std::vector<cplx> u(bb16.y.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = bb16.y[i] / eq.input_scale;
    for (std::size_t nsy = 0; nsy < n; ++nsy) {
        const std::size_t center = nsy * eq.decim + eq.delay;
        if (center + 1 < static_cast<std::size_t>(taps) || center >= u.size()) continue;
        cplx acc{0.0, 0.0};
        const cplx* base = u.data() + (center - taps + 1);
        for (int k = 0; k < taps; ++k) acc += eq.taps(k) * base[taps - 1 - k];
        out[nsy] = acc;
    }
    return out;
}

std::size_t equalizer_first_valid(const EqualizerState& eq) {
    const int taps = static_cast<int>(eq.taps.size());
    const int num = taps - 1 - eq.delay;
    return static_cast<std::size_t>(std::max(0, (num + eq.decim - 1) / eq.decim));
}

double evm_percent(const std::vector<cplx>& rx, const std::vector<cplx>& ref, std::size_t skip) {
    if (rx.size() != ref.size()) throw std::invalid_argument("evm: size mismatch");
    if (skip >= rx.size()) throw std::invalid_argument("evm: empty sequence after skip");
    double err = 0.0, sig = 0.0;
    for (std::size_t i = skip; i < rx.size(); ++i) {
        err += std::norm(rx[i] - ref[i]);
        sig += std::norm(ref[i]);
    }
    if (sig == 0.0) throw std::invalid_argument("evm: zero reference power");
    return 100.0 * std::sqrt(err / sig);
}

double mean_power(const ComplexBaseband& bb, std::size_t from) {
    if (from >= bb.y.size()) throw std::invalid_argument("mean_power: range empty");
    double acc = 0.0;
    for (std::size_t i = from; i < bb.y.size(); ++i) acc += std::norm(bb.y[i]);
    return acc / static_cast<double>(bb.y.size() - from);
}

} // namespace plrx
