#include "plrx/scenario.hpp"

#include "plrx/baseband.hpp"
#include "plrx/constants.hpp"
#include "plrx/freq_solver.hpp"
#include "plrx/mesh.hpp"
#include "plrx/transient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace plrx {

using cplx = std::complex<double>;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

using Section = std::map<std::string, std::string>;
using Ini = std::map<std::string, Section>;

Ini parse_ini(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    Ini ini;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            ini[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        ini[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return ini;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    }
}

void apply_receiver(ReceiverConfig& cfg, const Section& sec, const std::string& name) {
    for (const auto& [k, v] : sec) {
        if (k == "C0_pF") cfg.cap.C0 = to_double(k, v) * 1e-12;
        else if (k == "gamma") cfg.cap.gamma = to_double(k, v);
        else if (k == "f_p_MHz") cfg.cap.f_p = to_double(k, v) * 1e6;
        else if (k == "R_c_ohm") cfg.cap.R_c = to_double(k, v);
        else if (k == "pump_phase_rad") cfg.cap.pump_phase = to_double(k, v);
        else if (k == "L_m_nH") { cfg.mn.L_m = to_double(k, v) * 1e-9; cfg.mn.present = true; }
        else if (k == "C_m_pF") { cfg.mn.C_m = to_double(k, v) * 1e-12; cfg.mn.present = true; }
        else if (k == "inductor_Q") cfg.mn.inductor_Q = to_double(k, v);
        else if (k == "mn" && v == "none") cfg.mn.present = false;
        else if (k == "R_load_ohm") cfg.R_load = to_double(k, v);
        else throw ConfigError("unknown key '" + k + "' in [configs." + name + "]");
    }
}

struct CsvSink {
    std::string body;
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            body += cells[i];
            body += (i + 1 < cells.size()) ? ',' : '\n';
        }
    }
};

Artifact write_artifact(const std::string& out_dir, const std::string& name, const std::string& body) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = fs::path(out_dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << body;
    return {name, fnv1a64(body)};
}

std::string dB_or_empty(double w) {
    if (!std::isfinite(w) || w <= 0.0) return "";
    return fmt(watts_to_dBW(w));
}

// ---- scenario bodies -------------------------------------------------------

void run_power_sweep(const SimSetup& su, const AntennaEquivalent& ant, const Scenario& sc,
                     const std::string& out_dir, int jobs, RunResult& res) {
    for (const auto& name : sc.configs) {
        const MeshCircuit mesh = build_mesh(ant, su.config(name));
        const PowerSpectrum s = received_power_sweep(mesh, sc.f_lo, sc.f_hi, sc.n_points, 6, sc.phi, jobs);
        CsvSink csv;
        csv.row({"frequency_Hz", "P_signal_dBW", "P_idler_dBW", "P_combined_dBW"});
        for (std::size_t i = 0; i < s.freq.size(); ++i) {
            csv.row({fmt(s.freq[i]), dB_or_empty(s.P_signal[i]),
                     (su.config(name).cap.gamma > 0.0) ? dB_or_empty(s.P_idler[i]) : "",
                     std::isfinite(s.P_combined[i]) ? dB_or_empty(s.P_combined[i]) : ""});
        }
        res.artifacts.push_back(write_artifact(out_dir, "power_sweep_" + name + ".csv", csv.body));
    }
}

void run_step_response(const SimSetup& su, const AntennaEquivalent& ant, const Scenario& sc,
                       const std::string& out_dir, int jobs, RunResult& res) {
    for (const auto& name : sc.configs) {
        const MeshCircuit mesh = build_mesh(ant, su.config(name));
        const auto lib = build_step_library(mesh, ant.geom.f_center, sc.t_lib, 128, nullptr, jobs);
        CsvSink csv;
        csv.row({"t_s", "phi_rad", "y_abs", "y_re", "y_im"});
        for (std::size_t p = 0; p < lib.phases.size(); ++p)
            for (std::size_t i = 0; i < lib.entries[p].size(); ++i) {
                const cplx v = lib.entries[p][i];
                csv.row({fmt(static_cast<double>(i) * lib.dt), fmt(lib.phases[p]),
                         fmt(std::abs(v)), fmt(v.real()), fmt(v.imag())});
            }
        res.artifacts.push_back(write_artifact(out_dir, "step_response_" + name + ".csv", csv.body));
    }
}

void run_constellation(const SimSetup& su, const AntennaEquivalent& ant, const Scenario& sc,
                       const std::string& out_dir, int jobs, RunResult& res) {
    const auto seq = prbs_symbols(sc.seed, static_cast<std::size_t>(sc.n_symbols));
    for (const auto& name : sc.configs) {
        const MeshCircuit mesh = build_mesh(ant, su.config(name));
        const auto lib = build_step_library(mesh, ant.geom.f_center, sc.t_lib, 128, nullptr, jobs);
        const auto bb = synthesize_response(lib, seq, sc.symbol_rate);
        // raw sampled constellation at end-of-symbol instants, rotated and
        // scaled by the least-squares complex gain
        std::vector<cplx> rx(seq.size());
        for (std::size_t n = 0; n < seq.size(); ++n) rx[n] = bb.y[n * 16 + 15];
        cplx num{0, 0}, den{0, 0};
        for (std::size_t n = 16; n < seq.size(); ++n) {
            num += std::conj(seq.symbols[n]) * rx[n];
            den += std::conj(seq.symbols[n]) * seq.symbols[n];
        }
        const cplx g = num / den;
        const auto eq = train_equalizer(bb, seq);
        const auto eqs = equalize(bb, eq, seq.size());
        CsvSink csv;
        csv.row({"symbol_index", "tx_I", "tx_Q", "rx_I", "rx_Q", "eq_I", "eq_Q"});
        for (std::size_t n = 0; n < seq.size(); ++n) {
            const cplx r = rx[n] / g;
            csv.row({fmt(static_cast<double>(n)), fmt(seq.symbols[n].real()),
                     fmt(seq.symbols[n].imag()), fmt(r.real()), fmt(r.imag()),
                     fmt(eqs[n].real()), fmt(eqs[n].imag())});
        }
        res.artifacts.push_back(write_artifact(out_dir, "constellation_" + name + ".csv", csv.body));
    }
}

void run_evm_curve(const SimSetup& su, const AntennaEquivalent& ant, const Scenario& sc,
                   const std::string& out_dir, int jobs, RunResult& res) {
    const double fc = ant.geom.f_center;
    const auto rates = sc.rates.empty() ? default_rate_grid(fc) : sc.rates;
    const auto seq = prbs_symbols(sc.seed, static_cast<std::size_t>(sc.n_symbols));

    // libraries once per config
    std::map<std::string, StepResponseLibrary> libs;
    for (const auto& name : sc.configs)
        libs.emplace(name, build_step_library(build_mesh(ant, su.config(name)), fc, sc.t_lib, 128,
                                              nullptr, jobs));

    // noise density anchored to the reference receiver at the anchor rate
    const auto& anchor_lib = libs.count("LTI") ? libs.at("LTI") : libs.begin()->second;
    const auto anchor_bb = synthesize_response(anchor_lib, seq, sc.snr_anchor_rate);
    const double p_anchor = mean_power(anchor_bb, 256);
    const double snr_lin = std::pow(10.0, sc.snr_anchor_dB / 10.0);
    const double n0 = p_anchor / snr_lin / (16.0 * sc.snr_anchor_rate);

    CsvSink csv;
    csv.row({"rate_sym_per_s", "config", "evm_percent", "snr_dB"});
    for (const double rate : rates) {
        for (const auto& name : sc.configs) {
            const double amp = std::sqrt(rate / sc.snr_anchor_rate);
            const auto clean = synthesize_response(libs.at(name), seq, rate, amp);
            const double psig = mean_power(clean, 256);
            const double sigma2 = n0 * 16.0 * rate;
            const double snr_dB = 10.0 * std::log10(psig / sigma2);
            const auto noisy = add_awgn(clean, n0, sc.seed ^ fnv1a64(name) ^
                                                      static_cast<std::uint64_t>(std::llround(rate)));
            const auto eq = train_equalizer(noisy, seq);
            const auto eqs = equalize(noisy, eq, seq.size());
            const double e = evm_percent(eqs, seq.symbols, 144);
            csv.row({fmt(rate), name, fmt(e), fmt(snr_dB)});
        }
    }
    res.artifacts.push_back(write_artifact(out_dir, "evm_curve.csv", csv.body));
}

double estimate_beat_frequency(const std::vector<double>& mag2, double dt) {
    // single-bin DFT scan around the expected range, parabolic refine
    const std::size_t n = mag2.size();
    double mean = 0.0;
    for (double v : mag2) mean += v;
    mean /= static_cast<double>(n);
    auto bin_power = [&](double f) {
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            acc += (mag2[i] - mean) * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(i) * dt);
        return std::norm(acc);
    };
    double best_f = 0.0, best_p = -1.0;
    for (double f = 20e3; f <= 2e6; f *= 1.02) {
        const double p = bin_power(f);
        if (p > best_p) { best_p = p; best_f = f; }
    }
    const double df = best_f * 0.01;
    const double pm = bin_power(best_f - df), p0 = bin_power(best_f), pp = bin_power(best_f + df);
    const double denom = pm - 2.0 * p0 + pp;
    if (std::abs(denom) > 0.0) {
        const double shift = 0.5 * (pm - pp) / denom;
        return best_f + shift * df;
    }
    return best_f;
}

void run_beat_demo(const SimSetup& su, const AntennaEquivalent& ant, const Scenario& sc,
                   const std::string& out_dir, int jobs, RunResult& res) {
    (void)jobs;
    const MeshCircuit mesh = build_mesh(ant, su.config("DTV"));
    const double dt = default_timestep(mesh, sc.detune_f, 128);

    CsvSink env;
    env.row({"t_s", "phi_rad", "y_abs"});
    CsvSink summary;
    summary.row({"phi_rad", "avg_power_W", "beat_freq_Hz"});
    bool wrote_waveform = false;
    for (int p = 0; p < sc.n_phases; ++p) {
        const double phi = kPi * p / sc.n_phases;
        Excitation exc;
        exc.f = sc.detune_f;
        exc.phi = phi;
        const Waveform w = simulate(mesh, exc, sc.t_beat, dt);
        if (!wrote_waveform) {
            // raw RF waveform export for the first phase (trailing slice)
            Waveform tail;
            tail.dt = w.dt;
            const std::size_t keep = std::min<std::size_t>(w.v.size(), 1 << 15);
            tail.t_start = static_cast<double>(w.v.size() - keep) * w.dt;
            tail.v.assign(w.v.end() - static_cast<std::ptrdiff_t>(keep), w.v.end());
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            const auto path = (fs::path(out_dir) / "beat_waveform.csv").string();
            write_waveform_csv(tail, path);
            std::ifstream is(path, std::ios::binary);
            std::stringstream ss;
            ss << is.rdbuf();
            res.artifacts.push_back({"beat_waveform.csv", fnv1a64(ss.str())});
            wrote_waveform = true;
        }
        const auto bb = downconvert(w, sc.detune_f);
        // trailing settled section
        const std::size_t i0 = bb.y.size() / 4;
        std::vector<double> mag2(bb.y.size() - i0);
        double avg = 0.0;
        for (std::size_t i = i0; i < bb.y.size(); ++i) {
            mag2[i - i0] = std::norm(bb.y[i]);
            avg += mag2[i - i0];
        }
        avg /= static_cast<double>(mag2.size());
        const double fbeat = estimate_beat_frequency(mag2, bb.dt);
        // envelope-average power into the load: |y|^2 / (2 R)
        summary.row({fmt(phi), fmt(avg / (2.0 * mesh.R_load_physical)), fmt(fbeat)});
        for (std::size_t i = 0; i < bb.y.size(); i += 8)
            env.row({fmt(static_cast<double>(i) * bb.dt), fmt(phi), fmt(std::abs(bb.y[i]))});
    }
    res.artifacts.push_back(write_artifact(out_dir, "beat_envelope.csv", env.body));
    res.artifacts.push_back(write_artifact(out_dir, "beat_summary.csv", summary.body));
}

} // namespace

ScenarioKind scenario_kind_from(const std::string& name) {
    if (name == "power_sweep") return ScenarioKind::power_sweep;
    if (name == "step_response") return ScenarioKind::step_response;
    if (name == "constellation") return ScenarioKind::constellation;
    if (name == "evm_curve") return ScenarioKind::evm_curve;
    if (name == "beat_demo") return ScenarioKind::beat_demo;
    throw ConfigError("unknown scenario kind: " + name);
}

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::power_sweep: return "power_sweep";
        case ScenarioKind::step_response: return "step_response";
        case ScenarioKind::constellation: return "constellation";
        case ScenarioKind::evm_curve: return "evm_curve";
        case ScenarioKind::beat_demo: return "beat_demo";
    }
    return "?";
}

const ReceiverConfig& SimSetup::config(const std::string& name) const {
    if (name == "LTI") return lti;
    if (name == "DTV") return dtv;
    if (name == "NDTV") return ndtv;
    throw ConfigError("unknown receiver config: " + name);
}

SimSetup load_config(const std::string& path) {
    const Ini ini = parse_ini(path);
    SimSetup su;
    for (const auto& [sec, kv] : ini) {
        if (sec == "antenna") {
            for (const auto& [k, v] : kv) {
                if (k == "outer_side_mm") su.geom.outer_side = to_double(k, v) * 1e-3;
                else if (k == "trace_width_mm") su.geom.trace_width = to_double(k, v) * 1e-3;
                else if (k == "conductivity_S_per_m") su.geom.conductivity = to_double(k, v);
                else if (k == "f_center_MHz") su.geom.f_center = to_double(k, v) * 1e6;
                else throw ConfigError("unknown key '" + k + "' in [antenna]");
            }
        } else if (sec.rfind("configs.", 0) == 0) {
            const std::string name = sec.substr(8);
            if (name == "LTI") apply_receiver(su.lti, kv, name);
            else if (name == "DTV") apply_receiver(su.dtv, kv, name);
            else if (name == "NDTV") apply_receiver(su.ndtv, kv, name);
            else throw ConfigError("unknown config section: " + sec);
        } else if (sec == "scenario") {
            auto& sc = su.scenario;
            for (const auto& [k, v] : kv) {
                if (k == "kind") sc.kind = scenario_kind_from(v);
                else if (k == "configs") sc.configs = split(v, ',');
                else if (k == "seed") sc.seed = static_cast<std::uint64_t>(to_double(k, v));
                else if (k == "f_lo_MHz") sc.f_lo = to_double(k, v) * 1e6;
                else if (k == "f_hi_MHz") sc.f_hi = to_double(k, v) * 1e6;
                else if (k == "n_points") sc.n_points = static_cast<int>(to_double(k, v));
                else if (k == "phi_rad") sc.phi = to_double(k, v);
                else if (k == "t_lib_us") sc.t_lib = to_double(k, v) * 1e-6;
                else if (k == "symbol_rate_Msym") sc.symbol_rate = to_double(k, v) * 1e6;
                else if (k == "n_symbols") sc.n_symbols = static_cast<int>(to_double(k, v));
                else if (k == "noise") sc.noise = (v == "true" || v == "1");
                else if (k == "rates_Msym") {
                    sc.rates.clear();
                    for (const auto& r : split(v, ',')) sc.rates.push_back(to_double(k, r) * 1e6);
                } else if (k == "snr_anchor_dB") sc.snr_anchor_dB = to_double(k, v);
                else if (k == "detune_MHz") sc.detune_f = to_double(k, v) * 1e6;
                else if (k == "n_phases") sc.n_phases = static_cast<int>(to_double(k, v));
                else if (k == "t_beat_us") sc.t_beat = to_double(k, v) * 1e-6;
                else throw ConfigError("unknown key '" + k + "' in [scenario]");
            }
        } else if (!sec.empty()) {
            throw ConfigError("unknown section: [" + sec + "]");
        }
    }
    su.geom.validate();
    su.lti.validate(su.geom.f_center);
    su.dtv.validate(su.geom.f_center);
    su.ndtv.validate(su.geom.f_center);
    return su;
}

std::vector<double> default_rate_grid(double f_center) {
    // carrier cycles per symbol, log-spaced 0.0625..4 Msym/s at 100 MHz
    static const int cycles[] = {1600, 950, 575, 325, 200, 125, 75, 50, 25};
    std::vector<double> rates;
    for (int c : cycles) rates.push_back(f_center / c);
    return rates;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunResult run_scenario(const SimSetup& setup, const std::string& out_dir, int jobs) {
    const AntennaEquivalent raw = loop_equivalent(setup.geom);
    const AntennaEquivalent ant =
        calibrate_receiver_family(raw, setup.lti, setup.dtv, setup.ndtv);

    RunResult res;
    const auto& sc = setup.scenario;
    switch (sc.kind) {
        case ScenarioKind::power_sweep: run_power_sweep(setup, ant, sc, out_dir, jobs, res); break;
        case ScenarioKind::step_response: run_step_response(setup, ant, sc, out_dir, jobs, res); break;
        case ScenarioKind::constellation: run_constellation(setup, ant, sc, out_dir, jobs, res); break;
        case ScenarioKind::evm_curve: run_evm_curve(setup, ant, sc, out_dir, jobs, res); break;
        case ScenarioKind::beat_demo: run_beat_demo(setup, ant, sc, out_dir, jobs, res); break;
    }

    std::string mj = "{\n  \"scenario\": \"" + std::string(to_string(sc.kind)) + "\",\n  \"artifacts\": [\n";
    for (std::size_t i = 0; i < res.artifacts.size(); ++i) {
        char hex[32];
        std::snprintf(hex, sizeof hex, "0x%016llx",
                      static_cast<unsigned long long>(res.artifacts[i].fnv64));
        mj += "    {\"file\": \"" + res.artifacts[i].file + "\", \"fnv64\": \"" + hex + "\"}";
        mj += (i + 1 < res.artifacts.size()) ? ",\n" : "\n";
    }
    mj += "  ]\n}\n";
    const auto m = write_artifact(out_dir, "manifest.json", mj);
    res.manifest_path = m.file;
    return res;
}

} // namespace plrx
