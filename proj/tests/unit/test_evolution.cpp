#include "adiaqnn/evolution.hpp"
#include "adiaqnn/gates.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace adiaqnn;

namespace {

// Small schedule with modest fields so that runs stay cheap.
FieldSchedule small_schedule() { return FieldSchedule({{0.0, 0.0, 1e5}, {0.5, 3.0, 2e4}, {1.0, 6.0, 0.0}}); }

IntegratorConfig tight(double tol = 1e-9) {
    IntegratorConfig c;
    c.initial_steps = 64;
    c.tol = tol;
    return c;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("stationary product state picks up only the dynamical phase") {
    HamiltonianParams p = TrapPreset::fountain().params();
    const FieldSchedule c = FieldSchedule::constant(0.0, 1e5);
    const double T = 3.7;
    const auto grid = uniform_grid(11);
    const EvolutionResult r = evolve(basis_state(SpinConfig::all_up()), c, p, T, tight(), grid);
    const double E0 = diagonal_energy(SpinConfig::all_up(), [&] {
        HamiltonianParams q = p;
        q.B1 = 1.0;
        q.B2 = 0.1;
        return q;
    }());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Complex a = r.states[k](255, 0);
        CHECK(std::abs(a) == doctest::Approx(1.0));
        CHECK(std::abs(a - std::polar(1.0, -E0 * T * grid[k])) < 1e-9);
    }
}

TEST_CASE("T = 0 leaves the state unchanged") {
    const StateVector psi = apply_local_noise(SpinConfig::all_down(), 0.3);
    const EvolutionResult r =
        evolve(psi, small_schedule(), TrapPreset::fountain().params(), 0.0, tight(), uniform_grid(5));
    for (const auto& m : r.states) CHECK((m.col(0) - psi).norm() == 0.0);
    CHECK(r.steps == 0);
}

TEST_CASE("evolution matches the Runge-Kutta oracle") {
    const auto& o = oracle()["evolution"];
    std::vector<ScheduleNode> nodes;
    for (const auto& n : o["nodes"]) nodes.push_back({n[0], n[1], n[2]});
    const FieldSchedule s(nodes, o["ratio1"], o["ratio2"]);
    HamiltonianParams p;
    p.lambda = o["params"]["lam"];
    p.r1 = o["params"]["r1"];
    p.r2 = o["params"]["r2"];
    p.r3 = o["params"]["r3"];
    std::vector<double> grid;
    for (const auto& row : o["samples"]) grid.push_back(row["s"]);
    const GateSpec h = GateSpec::hadamard_like();
    IntegratorConfig cfg = tight(1e-8);
    cfg.initial_steps = 1024;
    const EvolutionResult r = evolve(h.encoding.basis(), s, p, o["T"], cfg, grid);
    const ComplexMatrix targets = h.target_states();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& row = o["samples"][k];
        const Complex up = r.states[k](255, 0);
        CHECK(up.real() == doctest::Approx(row["re_up"].get<double>()).epsilon(1e-6));
        CHECK(up.imag() == doctest::Approx(row["im_up"].get<double>()).epsilon(1e-6));
        CHECK(gate_fidelity_closed_form(logical_block(targets, r.states[k])) ==
              doctest::Approx(row["fidelity"].get<double>()).epsilon(1e-7));
    }
}

TEST_CASE("global phase covariance and unitarity") {
    const HamiltonianParams p = TrapPreset::fountain().params(0.3);
    const StateVector psi = apply_local_noise(SpinConfig::from_string("uuuudddd"), 0.2);
    const Complex phase = std::polar(1.0, 0.7);
    const auto grid = uniform_grid(21);
    const EvolutionResult a = evolve_fixed(psi, small_schedule(), p, 5.0, 400, grid);
    const EvolutionResult b = evolve_fixed(StateVector(phase * psi), small_schedule(), p, 5.0, 400, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK((b.states[k] - phase * a.states[k]).norm() < 1e-12);
        CHECK(std::abs(a.states[k].col(0).norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("full-space and reduced propagation agree") {
    const HamiltonianParams p = TrapPreset::fountain().params(0.5);
    ComplexMatrix in(kDim, 2);
    in.col(0) = basis_state(SpinConfig::all_up());
    in.col(1) = basis_state(SpinConfig::from_string("uddddddd"));   // leaves the symmetric span
    const EvolutionResult both = evolve_fixed(in, small_schedule(), p, 4.0, 300, {0.5, 1.0});
    const EvolutionResult red = evolve_fixed(ComplexMatrix(in.col(0)), small_schedule(), p, 4.0, 300, {0.5, 1.0});
    CHECK_FALSE(both.reduced);
    CHECK(red.reduced);
    CHECK((both.states[1].col(0) - red.states[1].col(0)).norm() < 1e-10);
}

TEST_CASE("refinement converges with shrinking differences") {
    const HamiltonianParams p = TrapPreset::fountain().params();
    const ComplexMatrix in = GateSpec::hadamard_like().encoding.basis();
    ComplexMatrix prev;
    double last = INFINITY;
    for (std::size_t n = 4096; n <= 32768; n *= 2) {
        const EvolutionResult r = evolve_fixed(in, small_schedule(), p, 30.0, n, {1.0});
        if (prev.size()) {
            const double d = (r.states[0] - prev).colwise().norm().maxCoeff();
            CHECK(d < last);
            last = d;
        }
        prev = r.states[0];
    }
    CHECK(last < 1e-6);
}

TEST_CASE("linearity: a superposed input evolves as the superposition") {
    const HamiltonianParams p = TrapPreset::fountain().params();
    const GateSpec g = GateSpec::bell();
    IntegratorConfig cfg = tight(1e-6);
    const EvolutionResult basis = evolve(g.encoding.basis(), small_schedule(), p, 20.0, cfg, {1.0});
    Eigen::VectorXcd a(4);
    a << Complex(0.3, 0.1), Complex(-0.5, 0.2), Complex(0.1, -0.6), Complex(0.4, 0.0);
    a.normalize();
    const StateVector in = g.encoding.basis() * a;
    const EvolutionResult direct = evolve(in, small_schedule(), p, 20.0, cfg, {1.0});
    CHECK((direct.states[0].col(0) - basis.states[0] * a).norm() <= 1e-6);
}

TEST_CASE("non-convergence reports the best estimate") {
    IntegratorConfig cfg;
    cfg.initial_steps = 4;
    cfg.max_steps = 16;
    cfg.tol = 1e-12;
    try {
        evolve(basis_state(SpinConfig::all_up()), small_schedule(), TrapPreset::fountain().params(), 50.0, cfg, {1.0});
        FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
        CHECK(e.distance() > 1e-12);
        CHECK(e.best().states.size() == 1);
        CHECK(e.exit_code() == ExitCode::numerical_failure);
    }
    IntegratorConfig bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(evolve(basis_state(SpinConfig::all_up()), small_schedule(), TrapPreset::fountain().params(), 1.0,
                           bad, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(evolve(StateVector(StateVector::Zero(kDim)), small_schedule(), TrapPreset::fountain().params(),
                           1.0, tight(), {1.0}),
                    std::invalid_argument);
}

TEST_CASE("dynamical phase on simple families") {
    const auto grid = uniform_grid(101);
    const SpectrumTrace flat = trace_family([](double) { return ComplexMatrix(ComplexMatrix::Identity(2, 2) * 2.5); }, grid);
    CHECK(dynamical_phase(flat, 0, 3.0) == doctest::Approx(-7.5));
    const SpectrumTrace lin = trace_family(
        [](double s) {
            ComplexMatrix H = ComplexMatrix::Zero(2, 2);
            H(0, 0) = s;
            H(1, 1) = 10.0;
            return H;
        },
        grid);
    CHECK(dynamical_phase(lin, 0, 4.0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("dynamical phase converges under grid doubling") {
    const FieldSchedule s = fountain_default_preset().schedule;
    const HamiltonianParams p = TrapPreset::fountain().params();
    const PhaseRecord a = phase_record(0, s, p, 1000.0, uniform_grid(2001));
    const PhaseRecord b = phase_record(0, s, p, 1000.0, uniform_grid(4001));
    CHECK(std::abs(a.dynamical - b.dynamical) <= 1e-6 * std::abs(b.dynamical));
    CHECK_FALSE(a.ambiguous);
}

TEST_CASE("Berry phase") {
    const auto grid = uniform_grid(401);
    const SpectrumTrace flat = trace_family([](double) { return ComplexMatrix(ComplexMatrix::Identity(3, 3)); }, grid);
    CHECK(berry_phase(flat, 0) == 0.0);

    // -n.sigma around a cone of half-angle theta: ground state follows n
    const double theta = 0.9;
    auto family = [theta](double s) {
        const double phi = 2.0 * std::numbers::pi * s;
        const Complex i(0.0, 1.0);
        ComplexMatrix H(2, 2);
        H << -std::cos(theta), -std::sin(theta) * std::exp(-i * phi),
             -std::sin(theta) * std::exp(i * phi), std::cos(theta);
        return H;
    };
    const double omega = 2.0 * std::numbers::pi * (1.0 - std::cos(theta));
    const SpectrumTrace loop = trace_family(family, uniform_grid(2001));
    double expect = std::remainder(-omega / 2.0, 2.0 * std::numbers::pi);
    CHECK(std::abs(berry_phase(loop, 0, true) - expect) < 1e-4);
    // the excited state picks up the opposite phase
    expect = std::remainder(omega / 2.0, 2.0 * std::numbers::pi);
    CHECK(std::abs(berry_phase(loop, 1, true) - expect) < 1e-4);

    const SpectrumTrace qnn = trace_spectrum(fountain_default_preset().schedule, TrapPreset::fountain().params(),
                                             uniform_grid(201));
    for (int level = 0; level < 4; ++level) CHECK(std::abs(berry_phase(qnn, level)) <= 1e-8);
}

TEST_CASE("adiabatic reference for constant Hamiltonians") {
    HamiltonianParams p = TrapPreset::fountain().params();
    const FieldSchedule c = FieldSchedule::constant(0.0, 1e5);
    const double T = 2.0;
    const auto grid = uniform_grid(3);
    const StateVector one = adiabatic_reference({Complex(1.0, 0.0)}, c, p, T, grid);
    const EvolutionResult r = evolve(basis_state(SpinConfig::all_up()), c, p, T, tight(), {1.0});
    CHECK((one - r.states[0].col(0)).norm() < 1e-9);

    const double h = 1.0 / std::sqrt(2.0);
    const SpectrumTrace tr = trace_spectrum(c, p, grid);
    const StateVector two = adiabatic_reference({Complex(h, 0.0), Complex(h, 0.0)}, tr, T);
    const double E0 = tr.snapshots[0].energies(0), E1 = tr.snapshots[0].energies(1);
    const Complex rel = two(0) / two(255);
    CHECK(std::abs(rel - std::polar(1.0, -(E1 - E0) * T)) < 1e-9);
    CHECK_THROWS_AS(adiabatic_reference({Complex(1.0, 0.0), Complex(1.0, 0.0)}, tr, T), std::invalid_argument);
}

TEST_CASE("adiabatic reference tracks evolve as T grows") {
    // B stays on, so the ground state keeps a wide gap
    const FieldSchedule s({{0.0, 0.0, 1e5}, {1.0, 6.0, 1e5}});
    const HamiltonianParams p = TrapPreset::fountain().params();
    const auto grid = uniform_grid(4001);
    TraceOptions opts;
    opts.keep = 1;
    opts.symmetric_sector = true;
    const SpectrumTrace tr = trace_spectrum(s, p, grid, opts);
    const StateVector psi0 = tr.snapshots.front().eigenvectors.col(0);
    double prev = INFINITY;
    for (double T : {0.05, 5.0, 500.0}) {
        IntegratorConfig cfg = tight(1e-7);
        cfg.initial_steps = 2048;
        const EvolutionResult r = evolve(psi0, s, p, T, cfg, {1.0});
        const double d = (r.states[0].col(0) - adiabatic_reference({Complex(1.0, 0.0)}, tr, T)).norm();
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-2);
}

}  // TEST_SUITE
