#include "adiaqnn/gates.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace adiaqnn;

TEST_SUITE("gates") {

TEST_CASE("single-flip states") {
    const StateVector w = w_state(SpinConfig::all_down());
    CHECK(w.norm() == doctest::Approx(1.0));
    for (int ion = 1; ion <= kIons; ++ion)
        CHECK(w(SpinConfig::all_down().flipped(ion).index()).real() == doctest::Approx(1.0 / std::sqrt(8.0)));
    CHECK((w.array().abs() > 0).count() == 8);
    const StateVector wu = w_state(SpinConfig::all_up());
    CHECK(wu(SpinConfig::from_string("uuuduuuu").index()).real() == doctest::Approx(1.0 / std::sqrt(8.0)));
    CHECK(std::abs(wu.norm() - 1.0) < 1e-15);
}

TEST_CASE("local noise") {
    const StateVector a = apply_local_noise(SpinConfig::all_down(), 0.0);
    CHECK((a - basis_state(SpinConfig::all_down())).norm() == 0.0);
    const StateVector b = apply_local_noise(SpinConfig::all_down(), 0.1);
    CHECK(b(0).real() == doctest::Approx(1.0 / std::sqrt(1.01)));
    CHECK(b(1).real() == doctest::Approx(0.1 / (std::sqrt(8.0) * std::sqrt(1.01))));
    for (double e : {0.0, 0.05, 0.3, 2.0}) CHECK(std::abs(apply_local_noise(SpinConfig(0xF0), e).norm() - 1.0) < 1e-15);
    CHECK_THROWS_AS(apply_local_noise(SpinConfig::all_down(), -0.1), std::invalid_argument);
}

TEST_CASE("gate targets") {
    for (const GateSpec& g : {GateSpec::hadamard_like(), GateSpec::bell()}) {
        const Eigen::Index d = g.dimension();
        CHECK((g.target.adjoint() * g.target - ComplexMatrix::Identity(d, d)).norm() < 1e-12);
        CHECK(g.target.imag().norm() == 0.0);
    }
    const double r = 1.0 / std::sqrt(2.0);
    const ComplexMatrix H = GateSpec::hadamard_like().target;
    CHECK(H(0, 0).real() == doctest::Approx(r));    // |0> -> (|0>+|1>)/sqrt2
    CHECK(H(1, 0).real() == doctest::Approx(r));
    CHECK(H(0, 1).real() == doctest::Approx(-r));   // |1> -> -(|0>-|1>)/sqrt2
    CHECK(H(1, 1).real() == doctest::Approx(r));
    CHECK(std::abs(H.trace()) == doctest::Approx(std::sqrt(2.0)));

    // columns: 00, 01, 10, 11 -> phi+, psi+, -psi-, -phi-
    const ComplexMatrix B = GateSpec::bell().target;
    Eigen::Vector4d phip(r, 0, 0, r), psip(0, r, r, 0), mpsim(0, -r, r, 0), mphim(-r, 0, 0, r);
    CHECK((B.col(0).real() - phip).norm() < 1e-15);
    CHECK((B.col(1).real() - psip).norm() < 1e-15);
    CHECK((B.col(2).real() - mpsim).norm() < 1e-15);
    CHECK((B.col(3).real() - mphim).norm() < 1e-15);
    CHECK(GateSpec::bell().encoding.states[1] == SpinConfig::from_string("uuuudddd"));
    CHECK(GateSpec::bell().encoding.states[3] == SpinConfig::all_down());
    CHECK_THROWS(GateSpec::by_name("cnot"));
}

TEST_CASE("encoding verification") {
    const FieldSchedule s = fountain_default_preset().schedule;
    const EncodingReport f = verify_encoding(LogicalEncoding::two_qubit(), s, TrapPreset::fountain().params());
    CHECK(f.passed);
    for (double ov : f.overlaps) CHECK(std::abs(ov - 1.0) <= 1e-12);
    const EncodingReport h = verify_encoding(LogicalEncoding::one_qubit(), s, TrapPreset::harmonic().params());
    CHECK(h.passed);
    for (double ov : h.overlaps) CHECK(std::abs(ov - 1.0) <= 1e-12);

    // B1 < B2 swaps the middle pair of levels
    const FieldSchedule swapped({{0.0, 0.0, 1e5}, {1.0, 10.0, 0.0}}, 1e-6, 1e-5);
    CHECK_FALSE(verify_encoding(LogicalEncoding::two_qubit(), swapped, TrapPreset::fountain().params()).passed);
    CHECK_FALSE(verify_encoding(LogicalEncoding::two_qubit(), s, TrapPreset::harmonic().params()).passed);
}

TEST_CASE("classical limits") {
    CHECK(classical_limit(2) == 2.0 / 3.0);
    CHECK(classical_limit(4) == 2.0 / 5.0);
    CHECK(classical_limit(1) == 1.0);
    CHECK_THROWS(classical_limit(0));
}

TEST_CASE("closed-form fidelity") {
    CHECK(gate_fidelity_closed_form(ComplexMatrix::Identity(2, 2)) == doctest::Approx(1.0));
    CHECK(gate_fidelity_closed_form(ComplexMatrix::Zero(2, 2)) == 0.0);
    ComplexMatrix flip = ComplexMatrix::Identity(2, 2);
    flip(1, 1) = -1.0;
    CHECK(gate_fidelity_closed_form(flip) == doctest::Approx(1.0 / 3.0));
    CHECK(gate_fidelity_closed_form(ComplexMatrix::Identity(4, 4) * std::polar(1.0, 1.1)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gate_fidelity_closed_form(ComplexMatrix::Identity(3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(gate_fidelity_closed_form(ComplexMatrix::Identity(2, 4)), std::invalid_argument);
}

TEST_CASE("closed form agrees with the frozen high-statistics Haar average") {
    const auto& o = oracle()["haar_average"];
    ComplexMatrix M(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M(i, j) = Complex(o["re"][i][j].get<double>(), o["im"][i][j].get<double>());
    CHECK(std::abs(gate_fidelity_closed_form(M) - o["mean"].get<double>()) <= 4.0 * o["std_error"].get<double>());
}

TEST_CASE("Monte-Carlo fidelity") {
    const GateSpec h = GateSpec::hadamard_like();
    const McEstimate perfect = gate_fidelity_mc(h.target_states(), h, 500, 1);
    CHECK(perfect.mean == doctest::Approx(1.0));
    CHECK(perfect.std_error < 1e-8);

    // evolved map whose logical block is diag(1, -1)
    ComplexMatrix flip = ComplexMatrix::Identity(2, 2);
    flip(1, 1) = -1.0;
    const ComplexMatrix evolved = h.target_states() * flip;
    const McEstimate est = gate_fidelity_mc(evolved, h, 10000, 42);
    CHECK(std::abs(est.mean - 1.0 / 3.0) <= 3.0 * est.std_error);

    const McEstimate again = gate_fidelity_mc(evolved, h, 10000, 42);
    CHECK(again.mean == est.mean);
    CHECK(again.std_error == est.std_error);
    const McEstimate threaded = gate_fidelity_mc(evolved, h, 10000, 42, 3);
    CHECK(threaded.mean == est.mean);
    CHECK(gate_fidelity_mc(evolved, h, 10000, 43).mean != est.mean);
    CHECK_THROWS(gate_fidelity_mc(evolved, h, 0, 1));
}

TEST_CASE("zero-time experiment scores the bare encoding") {
    const FieldSchedule s = fountain_default_preset().schedule;
    const auto grid = uniform_grid(3);
    IntegratorConfig cfg;
    const GateExperiment h = run_gate_experiment(GateSpec::hadamard_like(), s, TrapPreset::fountain().params(), {0.0},
                                                 0.0, cfg, grid);
    for (const auto& x : h.traces[0].samples) CHECK(x.fidelity == doctest::Approx(2.0 / 3.0));
    CHECK(h.traces[0].classical_limit == 2.0 / 3.0);
    const GateExperiment b =
        run_gate_experiment(GateSpec::bell(), s, TrapPreset::fountain().params(), {0.0}, 0.0, cfg, grid);
    for (const auto& x : b.traces[0].samples) CHECK(x.fidelity == doctest::Approx(0.6));
}

TEST_CASE("short experiment: traces, noise partners and the Monte-Carlo cross-check") {
    const FieldSchedule s({{0.0, 0.0, 1e5}, {0.5, 3.0, 2e4}, {1.0, 6.0, 0.0}});
    IntegratorConfig cfg;
    cfg.initial_steps = 256;
    cfg.tol = 1e-6;
    const auto grid = uniform_grid(21);
    const GateSpec g = GateSpec::bell();
    const GateExperiment ex =
        run_gate_experiment(g, s, TrapPreset::fountain().params(0.5), {0.0, 0.1, 0.3}, 7.0, cfg, grid);
    REQUIRE(ex.traces.size() == 3);
    CHECK(ex.evolution.states[0].cols() == 8);
    for (const auto& tr : ex.traces) {
        CHECK(tr.r3 == 0.5);
        for (const auto& x : tr.samples) {
            CHECK(x.fidelity >= 0.0);
            CHECK(x.fidelity <= 1.0);
        }
    }
    // f is blind to a global phase on the evolved map
    const ComplexMatrix E = ex.evolved_basis(10, 0.1);
    const double f = gate_fidelity_closed_form(logical_block(g.target_states(), E));
    CHECK(gate_fidelity_closed_form(logical_block(g.target_states(), E * std::polar(1.0, 2.0))) == doctest::Approx(f));
    CHECK(ex.traces[1].samples[10].fidelity == doctest::Approx(f));
    const McEstimate mc = gate_fidelity_mc(E, g, 10000, 5);
    CHECK(std::abs(mc.mean - f) <= 3.0 * mc.std_error);

    CHECK_THROWS_AS(run_gate_experiment(g, s, TrapPreset::harmonic().params(), {0.0}, 1.0, cfg, grid), NumericalError);
    CHECK_THROWS_AS(run_gate_experiment(g, s, TrapPreset::fountain().params(), {-0.1}, 1.0, cfg, grid),
                    std::invalid_argument);
}

TEST_CASE("trace peak is the first maximum") {
    FidelityTrace t;
    t.samples = {{0.0, 0.2}, {0.5, 0.9}, {0.7, 0.9}, {1.0, 0.1}};
    CHECK(t.peak().s == 0.5);
}

}  // TEST_SUITE
