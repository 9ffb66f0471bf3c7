#include "plrx/baseband.hpp"
#include "plrx/calibrate.hpp"
#include "plrx/freq_solver.hpp"
#include "plrx/scenario.hpp"
#include "plrx/transient.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace plrx;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Parametrically loaded small-loop receiver simulator";

    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::enum_<ReceiverKind>(m, "ReceiverKind")
        .value("LTI", ReceiverKind::LTI)
        .value("DTV", ReceiverKind::DTV)
        .value("NDTV", ReceiverKind::NDTV);

    py::class_<TimeVaryingCap>(m, "TimeVaryingCap")
        .def(py::init<>())
        .def_readwrite("C0", &TimeVaryingCap::C0)
        .def_readwrite("gamma", &TimeVaryingCap::gamma)
        .def_readwrite("f_p", &TimeVaryingCap::f_p)
        .def_readwrite("R_c", &TimeVaryingCap::R_c)
        .def_readwrite("pump_phase", &TimeVaryingCap::pump_phase)
        .def("capacitance_at", &TimeVaryingCap::capacitance_at)
        .def("harmonics", &TimeVaryingCap::harmonics);

    py::class_<MatchingNetwork>(m, "MatchingNetwork")
        .def(py::init<>())
        .def_readwrite("present", &MatchingNetwork::present)
        .def_readwrite("L_m", &MatchingNetwork::L_m)
        .def_readwrite("C_m", &MatchingNetwork::C_m)
        .def_readwrite("inductor_Q", &MatchingNetwork::inductor_Q);

    py::class_<ReceiverConfig>(m, "ReceiverConfig")
        .def(py::init<>())
        .def_readwrite("kind", &ReceiverConfig::kind)
        .def_readwrite("cap", &ReceiverConfig::cap)
        .def_readwrite("mn", &ReceiverConfig::mn)
        .def_readwrite("R_load", &ReceiverConfig::R_load)
        .def("validate", &ReceiverConfig::validate);

    m.def("lti_config", &lti_config);
    m.def("dtv_config", &dtv_config);
    m.def("ndtv_config", &ndtv_config);
    m.def("idler_frequency", &idler_frequency);

    py::class_<LoopGeometry>(m, "LoopGeometry")
        .def(py::init<>())
        .def_readwrite("outer_side", &LoopGeometry::outer_side)
        .def_readwrite("trace_width", &LoopGeometry::trace_width)
        .def_readwrite("conductivity", &LoopGeometry::conductivity)
        .def_readwrite("f_center", &LoopGeometry::f_center)
        .def("area", &LoopGeometry::area)
        .def("ka", &LoopGeometry::ka);

    py::class_<StructuralResonance>(m, "StructuralResonance")
        .def_readwrite("L", &StructuralResonance::L)
        .def_readwrite("C", &StructuralResonance::C)
        .def_readwrite("R", &StructuralResonance::R);

    py::class_<AntennaEquivalent>(m, "AntennaEquivalent")
        .def(py::init<>())
        .def_readwrite("geom", &AntennaEquivalent::geom)
        .def_readwrite("L_a", &AntennaEquivalent::L_a)
        .def_readwrite("trap", &AntennaEquivalent::trap)
        .def_readwrite("port_coupling", &AntennaEquivalent::port_coupling)
        .def_readonly("directivity", &AntennaEquivalent::directivity)
        .def("radiation_resistance", &AntennaEquivalent::radiation_resistance)
        .def("conduction_resistance", &AntennaEquivalent::conduction_resistance)
        .def("voc_peak", &AntennaEquivalent::voc_peak)
        .def("radiation_efficiency", &AntennaEquivalent::radiation_efficiency);

    m.def("loop_equivalent", &loop_equivalent);
    m.def("calibrate_resonance", &calibrate_resonance);
    m.def(
        "calibrate_receiver_family",
        [](const AntennaEquivalent& ant, const ReceiverConfig& lti, const ReceiverConfig& dtv,
           const ReceiverConfig& ndtv) {
            return calibrate_receiver_family(ant, lti, dtv, ndtv);
        },
        py::arg("antenna"), py::arg("lti"), py::arg("dtv"), py::arg("ndtv"));
    m.def("default_calibrated_antenna", &default_calibrated_antenna,
          py::return_value_policy::reference);

    py::class_<MeshCircuit>(m, "MeshCircuit")
        .def_readonly("kind", &MeshCircuit::kind)
        .def_readonly("L_series", &MeshCircuit::L_series)
        .def_readonly("R_series", &MeshCircuit::R_series)
        .def_readonly("R_load_physical", &MeshCircuit::R_load_physical)
        .def("external_impedance", &MeshCircuit::external_impedance)
        .def("voc_peak", &MeshCircuit::voc_peak);
    m.def("build_mesh", &build_mesh);

    py::class_<AcResponse>(m, "AcResponse")
        .def_readonly("v_load", &AcResponse::v_load)
        .def_readonly("power", &AcResponse::power);
    m.def("ac_response", &ac_response, py::arg("mesh"), py::arg("f"), py::arg("amplitude") = 1.0,
          py::arg("phi") = 0.0);

    py::class_<ConversionResult>(m, "ConversionResult")
        .def_readonly("f_signal", &ConversionResult::f_signal)
        .def_readonly("f_k", &ConversionResult::f_k)
        .def_readonly("I_k", &ConversionResult::I_k)
        .def_readonly("v_load_k", &ConversionResult::v_load_k)
        .def_readonly("condition", &ConversionResult::condition)
        .def("signal_power", &ConversionResult::signal_power)
        .def("idler_power", &ConversionResult::idler_power)
        .def("coherent_signal_power", &ConversionResult::coherent_signal_power)
        .def("total_average_power", &ConversionResult::total_average_power)
        .def("degenerate_coincidence", &ConversionResult::degenerate_coincidence);
    m.def("conversion_matrix_solve", &conversion_matrix_solve, py::arg("mesh"), py::arg("f_s"),
          py::arg("K") = 6, py::arg("phi") = 0.0, py::arg("amplitude") = 1.0);

    py::class_<PowerSpectrum>(m, "PowerSpectrum")
        .def_readonly("freq", &PowerSpectrum::freq)
        .def_readonly("P_signal", &PowerSpectrum::P_signal)
        .def_readonly("P_idler", &PowerSpectrum::P_idler)
        .def_readonly("P_combined", &PowerSpectrum::P_combined)
        .def_readonly("errors", &PowerSpectrum::errors);
    m.def("received_power_sweep", &received_power_sweep, py::arg("mesh"), py::arg("f_lo"),
          py::arg("f_hi"), py::arg("n_points"), py::arg("K") = 6, py::arg("phi") = 0.0,
          py::arg("jobs") = 1);
    m.def("fractional_bandwidth", &fractional_bandwidth, py::arg("spectrum"),
          py::arg("level_dB") = -3.0, py::arg("exclude_center_spike") = false);

    py::class_<Excitation>(m, "Excitation")
        .def(py::init<>())
        .def_readwrite("amplitude", &Excitation::amplitude)
        .def_readwrite("f", &Excitation::f)
        .def_readwrite("phi", &Excitation::phi)
        .def_readwrite("t0", &Excitation::t0);

    py::class_<Waveform>(m, "Waveform")
        .def_readonly("dt", &Waveform::dt)
        .def_readonly("t_start", &Waveform::t_start)
        .def_readonly("v", &Waveform::v);
    m.def("default_timestep", &default_timestep, py::arg("mesh"), py::arg("f_signal"),
          py::arg("samples_per_cycle") = 512);
    m.def(
        "simulate",
        [](const MeshCircuit& mesh, const Excitation& exc, double t_end, double dt) {
            return simulate(mesh, exc, t_end, dt);
        },
        py::arg("mesh"), py::arg("excitation"), py::arg("t_end"), py::arg("dt"));
    m.def("steady_state_power", &steady_state_power);
    m.def("write_waveform_csv", &write_waveform_csv);

    py::class_<ComplexBaseband>(m, "ComplexBaseband")
        .def_readonly("dt", &ComplexBaseband::dt)
        .def_readonly("f_c", &ComplexBaseband::f_c)
        .def_readonly("y", &ComplexBaseband::y);
    m.def("downconvert", &downconvert, py::arg("waveform"), py::arg("f_c"),
          py::arg("cutoff") = 32e6);
    m.def("decimate_to_symbol_grid", &decimate_to_symbol_grid);

    py::class_<SymbolSequence>(m, "SymbolSequence")
        .def_readonly("seed", &SymbolSequence::seed)
        .def_readonly("indices", &SymbolSequence::indices)
        .def_readonly("symbols", &SymbolSequence::symbols);
    m.def("prbs_symbols", &prbs_symbols);
    m.def("qam16_constellation",
          [] { return std::vector<std::complex<double>>(qam16_constellation().begin(),
                                                        qam16_constellation().end()); });

    py::class_<StepResponseLibrary>(m, "StepResponseLibrary")
        .def_readonly("kind", &StepResponseLibrary::kind)
        .def_readonly("f_c", &StepResponseLibrary::f_c)
        .def_readonly("dt", &StepResponseLibrary::dt)
        .def_readonly("phases", &StepResponseLibrary::phases)
        .def_readonly("entries", &StepResponseLibrary::entries)
        .def_readonly("tails", &StepResponseLibrary::tails)
        .def("magnitude_spread", &StepResponseLibrary::magnitude_spread)
        .def("tail_ratio", &StepResponseLibrary::tail_ratio);
    m.def(
        "build_step_library",
        [](const MeshCircuit& mesh, double f_c, double t_lib, int spc, int jobs) {
            return build_step_library(mesh, f_c, t_lib, spc, nullptr, jobs);
        },
        py::arg("mesh"), py::arg("f_c"), py::arg("t_lib") = 8e-6,
        py::arg("samples_per_cycle") = 128, py::arg("jobs") = 1);

    m.def("synthesize_response", &synthesize_response, py::arg("library"), py::arg("symbols"),
          py::arg("symbol_rate"), py::arg("amplitude") = 1.0, py::arg("guard_symbols") = 8);
    m.def("add_awgn", &add_awgn);

    py::class_<EqualizerState>(m, "EqualizerState")
        .def_readonly("decim", &EqualizerState::decim)
        .def_readonly("delay", &EqualizerState::delay)
        .def_readonly("epochs_run", &EqualizerState::epochs_run)
        .def_readonly("mse_windows", &EqualizerState::mse_windows)
        .def_property_readonly("taps", [](const EqualizerState& e) {
            return std::vector<std::complex<double>>(e.taps.data(), e.taps.data() + e.taps.size());
        });
    m.def("train_equalizer", &train_equalizer, py::arg("baseband"), py::arg("symbols"),
          py::arg("taps") = 128, py::arg("decim") = 16, py::arg("mu") = 0.5,
          py::arg("max_epochs") = 50);
    m.def("equalize", &equalize);
    m.def("evm_percent", &evm_percent);
    m.def("mean_power", &mean_power, py::arg("baseband"), py::arg("from_sample") = 0);

    m.def("load_config", &load_config);
    m.def(
        "run_scenario",
        [](const SimSetup& setup, const std::string& out_dir, int jobs) {
            const auto r = run_scenario(setup, out_dir, jobs);
            std::vector<std::pair<std::string, std::uint64_t>> out;
            out.reserve(r.artifacts.size());
            for (const auto& a : r.artifacts) out.emplace_back(a.file, a.fnv64);
            return out;
        },
        py::arg("setup"), py::arg("out_dir"), py::arg("jobs") = 1);
    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("configs", &Scenario::configs)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("f_lo", &Scenario::f_lo)
        .def_readwrite("f_hi", &Scenario::f_hi)
        .def_readwrite("n_points", &Scenario::n_points)
        .def_readwrite("symbol_rate", &Scenario::symbol_rate)
        .def_readwrite("n_symbols", &Scenario::n_symbols)
        .def_property(
            "kind", [](const Scenario& s) { return std::string(to_string(s.kind)); },
            [](Scenario& s, const std::string& k) { s.kind = scenario_kind_from(k); });
    py::class_<SimSetup>(m, "SimSetup")
        .def(py::init<>())
        .def_readwrite("geom", &SimSetup::geom)
        .def_readwrite("lti", &SimSetup::lti)
        .def_readwrite("dtv", &SimSetup::dtv)
        .def_readwrite("ndtv", &SimSetup::ndtv)
        .def_readwrite("scenario", &SimSetup::scenario);
    m.def("default_rate_grid", &default_rate_grid);
    m.def("watts_to_dBW", &watts_to_dBW);
}
