#include "adiaqnn/calibrate.hpp"
#include "adiaqnn/commands.hpp"
#include "adiaqnn/config.hpp"
#include "adiaqnn/gates.hpp"
#include "adiaqnn/spectral.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace adiaqnn;

namespace {

FieldSchedule make_schedule(const std::vector<std::array<double, 3>>& nodes, double ratio1, double ratio2) {
    std::vector<ScheduleNode> n;
    for (const auto& [s, A, B] : nodes) n.push_back({s, A, B});
    return FieldSchedule(std::move(n), ratio1, ratio2);
}

py::dict experiment_dict(const GateExperiment& ex) {
    py::list traces;
    for (const auto& t : ex.traces) {
        std::vector<double> s, f;
        for (const auto& x : t.samples) {
            s.push_back(x.s);
            f.push_back(x.fidelity);
        }
        py::dict d;
        d["gate"] = t.gate;
        d["r2"] = t.r2;
        d["r3"] = t.r3;
        d["epsilon"] = t.epsilon;
        d["classical_limit"] = t.classical_limit;
        d["s"] = s;
        d["fidelity"] = f;
        d["peak_fidelity"] = t.peak().fidelity;
        d["peak_s"] = t.peak().s;
        traces.append(d);
    }
    py::dict out;
    out["T"] = ex.T;
    out["traces"] = traces;
    out["steps"] = ex.evolution.steps;
    out["convergence"] = ex.evolution.convergence;
    out["reduced_basis"] = ex.evolution.reduced;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact simulator of the eight-ion adiabatic quantum neural network";
    m.attr("__version__") = kVersion;
    m.attr("DIM") = kDim;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<CalibrationFailed>(m, "CalibrationFailed", PyExc_RuntimeError);

    py::class_<HamiltonianParams>(m, "HamiltonianParams")
        .def(py::init<>())
        .def(py::init([](double lambda, double r1, double r2, double r3, double A, double B1, double B2, bool sym) {
                 HamiltonianParams p;
                 p.lambda = lambda;
                 p.r1 = r1;
                 p.r2 = r2;
                 p.r3 = r3;
                 p.A = A;
                 p.B1 = B1;
                 p.B2 = B2;
                 p.r3_symmetric = sym;
                 return p;
             }),
             py::arg("lam") = 1.0, py::arg("r1") = 10.0, py::arg("r2") = 9.5, py::arg("r3") = 0.0, py::arg("A") = 0.0,
             py::arg("B1") = 0.0, py::arg("B2") = 0.0, py::arg("r3_symmetric") = false)
        .def_readwrite("lam", &HamiltonianParams::lambda)
        .def_readwrite("r1", &HamiltonianParams::r1)
        .def_readwrite("r2", &HamiltonianParams::r2)
        .def_readwrite("r3", &HamiltonianParams::r3)
        .def_readwrite("A", &HamiltonianParams::A)
        .def_readwrite("B1", &HamiltonianParams::B1)
        .def_readwrite("B2", &HamiltonianParams::B2)
        .def_readwrite("r3_symmetric", &HamiltonianParams::r3_symmetric)
        .def("__repr__", [](const HamiltonianParams& p) {
            return "HamiltonianParams(lam=" + std::to_string(p.lambda) + ", r1=" + std::to_string(p.r1) +
                   ", r2=" + std::to_string(p.r2) + ", r3=" + std::to_string(p.r3) + ")";
        });

    m.def("trap_params", [](const std::string& trap, double r3) { return TrapPreset::by_name(trap).params(r3); },
          py::arg("trap") = "fountain", py::arg("r3") = 0.0, "Couplings of a trap preset, fields zero.");

    py::class_<FieldSchedule>(m, "FieldSchedule")
        .def(py::init(&make_schedule), py::arg("nodes"), py::arg("ratio1") = 1e-5, py::arg("ratio2") = 1e-6,
             "nodes: list of (s, A, B)")
        .def("fields", [](const FieldSchedule& f, double s) {
            const Fields x = fields_at(f, s);
            return std::make_tuple(x.A, x.B1, x.B2);
        })
        .def_property_readonly("nodes", [](const FieldSchedule& f) {
            std::vector<std::array<double, 3>> out;
            for (const auto& n : f.nodes()) out.push_back({n.s, n.A, n.B});
            return out;
        })
        .def_property_readonly("ratio1", &FieldSchedule::ratio1)
        .def_property_readonly("ratio2", &FieldSchedule::ratio2);

    m.def("default_schedule", [] { return fountain_default_preset().schedule; });
    m.def("load_schedule", [](const std::filesystem::path& p) { return load_preset(p).schedule; });

    m.def("build_hamiltonian", &build_hamiltonian, py::arg("params"), "Dense 256x256 real Hamiltonian.");
    m.def("diagonal_energy",
          [](unsigned index, const HamiltonianParams& p) {
              if (index >= static_cast<unsigned>(kDim)) throw py::index_error("configuration index out of range");
              return diagonal_energy(SpinConfig(static_cast<std::uint8_t>(index)), p);
          },
          py::arg("index"), py::arg("params"));
    m.def("config_index", [](const std::string& spins) { return SpinConfig::from_string(spins).index(); },
          "Index of a product state written as 8 chars of u/d, ion 1 first.");

    m.def("spectrum",
          [](const FieldSchedule& f, const HamiltonianParams& p, std::size_t points, int levels, unsigned threads) {
              TraceOptions o;
              o.keep = 0;
              o.threads = threads;
              const SpectrumTrace tr = trace_spectrum(f, p, uniform_grid(points), o);
              Eigen::MatrixXd E(tr.size(), levels);
              for (std::size_t k = 0; k < tr.size(); ++k) E.row(k) = tr.snapshots[k].energies.head(levels).transpose();
              return std::make_pair(tr.grid(), E);
          },
          py::arg("schedule"), py::arg("params"), py::arg("points") = 101, py::arg("levels") = 5,
          py::arg("threads") = 1, "Returns (s grid, energies[points, levels]).");

    m.def("avoided_crossings",
          [](const std::vector<double>& s, const std::vector<double>& gap, int lower, const std::vector<double>& kinks) {
              std::vector<std::tuple<double, double, bool>> out;
              for (const auto& c : detect_avoided_crossings(s, gap, lower, kinks))
                  out.emplace_back(c.s_min, c.gap_min, c.boundary);
              return out;
          },
          py::arg("s"), py::arg("gap"), py::arg("lower") = 0, py::arg("kinks") = std::vector<double>{},
          "List of (s_min, gap_min, boundary). kinks: schedule node positions.");

    m.def("adiabatic_time_bound",
          [](const FieldSchedule& f, const HamiltonianParams& p, const std::vector<int>& levels, std::size_t points,
             unsigned threads) {
              const AdiabaticityReport r = adiabatic_time_bound(f, p, levels, uniform_grid(points), threads);
              py::dict d;
              d["T_bound"] = r.T_bound;
              d["s_at_bound"] = r.s_at_bound;
              d["min_gap"] = r.min_gap;
              d["s_min_gap"] = r.s_min_gap;
              d["divergent"] = r.divergent;
              return d;
          },
          py::arg("schedule"), py::arg("params"), py::arg("levels") = std::vector<int>{0, 1},
          py::arg("points") = 1001, py::arg("threads") = 1);

    m.def("classical_limit", &classical_limit, py::arg("d"));
    m.def("gate_fidelity_closed_form", &gate_fidelity_closed_form, py::arg("M"));
    m.def("gate_target", [](const std::string& g) { return GateSpec::by_name(g).target; }, py::arg("gate"));
    m.def("gate_fidelity_mc",
          [](const ComplexMatrix& evolved, const std::string& g, std::size_t samples, std::uint64_t seed,
             unsigned threads) {
              const McEstimate e = gate_fidelity_mc(evolved, GateSpec::by_name(g), samples, seed, threads);
              return std::make_pair(e.mean, e.std_error);
          },
          py::arg("evolved"), py::arg("gate"), py::arg("samples") = 10000, py::arg("seed") = 0,
          py::arg("threads") = 1, "evolved: 256 x d images of the logical basis. Returns (mean, std_error).");
    m.def("target_states", [](const std::string& g) { return GateSpec::by_name(g).target_states(); });

    m.def("verify_encoding",
          [](const std::string& g, const FieldSchedule& f, const HamiltonianParams& p) {
              const EncodingReport r = verify_encoding(GateSpec::by_name(g).encoding, f, p);
              return std::make_tuple(r.passed, r.overlaps, r.diagnostic);
          },
          py::arg("gate"), py::arg("schedule"), py::arg("params"), "Returns (passed, overlaps, diagnostic).");

    m.def("run_gate",
          [](const std::string& g, const FieldSchedule& f, const HamiltonianParams& p, double T,
             const std::vector<double>& epsilons, std::size_t samples, std::size_t initial_steps, double tol) {
              IntegratorConfig cfg;
              cfg.initial_steps = initial_steps;
              cfg.tol = tol;
              py::gil_scoped_release nogil;
              GateExperiment ex = run_gate_experiment(GateSpec::by_name(g), f, p, epsilons, T, cfg, uniform_grid(samples));
              py::gil_scoped_acquire again;
              return experiment_dict(ex);
          },
          py::arg("gate"), py::arg("schedule"), py::arg("params"), py::arg("T"),
          py::arg("epsilons") = std::vector<double>{0.0}, py::arg("samples") = 101, py::arg("initial_steps") = 4096,
          py::arg("tol") = 1e-2, "Evolve the encoded basis and score the fidelity trace.");

    m.def("run_cli",
          [](std::vector<std::string> args) {
              args.insert(args.begin(), "adiaqnn");
              std::vector<char*> argv;
              for (auto& a : args) argv.push_back(a.data());
              return run_cli(static_cast<int>(argv.size()), argv.data());
          },
          py::arg("args"), "Run the command-line interface in-process; returns the exit code.");
}
