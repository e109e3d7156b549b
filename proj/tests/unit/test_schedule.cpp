#include "adiaqnn/schedule.hpp"
#include "adiaqnn/spin_core.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace adiaqnn;

TEST_SUITE("schedule") {

TEST_CASE("fields on a single segment") {
    const FieldSchedule s({{0.0, 0.0, 1e5}, {1.0, 50.0, 0.0}});
    Fields f = fields_at(s, 0.0);
    CHECK(f.A == 0.0);
    CHECK(f.B1 == doctest::Approx(1.0));
    CHECK(f.B2 == doctest::Approx(0.1));
    f = fields_at(s, 0.5);
    CHECK(f.A == doctest::Approx(25.0));
    CHECK(f.B1 == doctest::Approx(0.5));
    CHECK(f.B2 == doctest::Approx(0.05));
    f = fields_at(s, 1.0);
    CHECK(f.A == 50.0);
    CHECK(f.B1 == 0.0);
    CHECK(f.B2 == 0.0);
}

TEST_CASE("slopes") {
    const FieldSchedule one({{0.0, 0.0, 1e5}, {1.0, 50.0, 0.0}});
    for (double s : {0.0, 0.3, 1.0}) {
        const Fields d = field_slope(one, s);
        CHECK(d.A == doctest::Approx(50.0));
        CHECK(d.B1 == doctest::Approx(-1.0));
        CHECK(d.B2 == doctest::Approx(-0.1));
    }
    const FieldSchedule three({{0.0, 0.0, 0.0}, {1.0 / 3.0, 0.0, 0.0}, {1.0, 100.0, 0.0}});
    CHECK(field_slope(three, 0.1).A == 0.0);
    CHECK(field_slope(three, 0.5).A == doctest::Approx(150.0));
    // right slope at an interior node, left slope at the end
    CHECK(field_slope(three, 1.0 / 3.0).A == doctest::Approx(150.0));
    CHECK(field_slope(three, 1.0).A == doctest::Approx(150.0));

    const FieldSchedule eq({{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, {1.0, 50.0, 0.0}});
    CHECK(field_slope(eq, 0.2).A == 0.0);
    CHECK(field_slope(eq, 0.7).A == doctest::Approx(100.0));

    const Fields c = field_slope(FieldSchedule::constant(3.0, 7.0), 0.4);
    CHECK(c.A == 0.0);
    CHECK(c.B1 == 0.0);
    CHECK(c.B2 == 0.0);
}

TEST_CASE("invalid schedules and scaled times are rejected") {
    CHECK_THROWS_AS(FieldSchedule({{0.0, 0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(FieldSchedule({{0.1, 0.0, 0.0}, {1.0, 0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(FieldSchedule({{0.0, 0.0, 0.0}, {0.9, 0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(FieldSchedule({{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, {0.5, 1.0, 0.0}, {1.0, 0.0, 0.0}}),
                    std::invalid_argument);
    const FieldSchedule s = FieldSchedule::constant(1.0, 1.0);
    CHECK_THROWS_AS(fields_at(s, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(fields_at(s, 1.01), std::invalid_argument);
    CHECK_THROWS_AS(field_slope(s, std::nan("")), std::invalid_argument);
}

TEST_CASE("interpolation is exactly linear on each segment") {
    const FieldSchedule s = fountain_default_preset().schedule;
    const auto& n = s.nodes();
    for (std::size_t k = 0; k + 1 < n.size(); ++k) {
        const Fields m = fields_at(s, 0.5 * (n[k].s + n[k + 1].s));
        CHECK(std::abs(m.A - 0.5 * (n[k].A + n[k + 1].A)) <= 1e-12 * std::max(1.0, std::abs(m.A)));
        const double B = 0.5 * (n[k].B + n[k + 1].B);
        CHECK(std::abs(m.B1 - s.ratio1() * B) <= 1e-12 * std::max(1.0, std::abs(m.B1)));
        CHECK(std::abs(m.B2 - s.ratio2() * B) <= 1e-12 * std::max(1.0, std::abs(m.B2)));
    }
}

TEST_CASE("field ratio holds wherever B is nonzero") {
    const FieldSchedule s({{0.0, 0.0, 3e4}, {0.6, 10.0, 1e4}, {1.0, 20.0, 0.0}}, 2e-5, 4e-6);
    for (int k = 0; k < 100; ++k) {
        const Fields f = fields_at(s, k / 100.0);
        CHECK(f.B1 / f.B2 == doctest::Approx(5.0));
    }
}

TEST_CASE("the Hamiltonian varies continuously along the default schedule") {
    const FieldSchedule s = fountain_default_preset().schedule;
    const HamiltonianTerms t = hamiltonian_terms(TrapPreset::fountain().params());
    for (double s0 : {0.0, 0.4, 0.5, 0.73}) {
        double prev = INFINITY;
        for (double delta : {1e-3, 1e-5, 1e-7}) {
            const Fields a = fields_at(s, s0), b = fields_at(s, std::min(1.0, s0 + delta));
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(t.assemble(b.A, b.B1, b.B2) - t.assemble(a.A, a.B1, a.B2),
                                                         Eigen::EigenvaluesOnly);
            const double nrm = es.eigenvalues().cwiseAbs().maxCoeff();
            CHECK(nrm < prev);
            prev = nrm;
        }
        CHECK(prev < 1e-4);
    }
}

TEST_CASE("shipped default preset") {
    const SchedulePreset p = fountain_default_preset();
    CHECK(p.name == "fountain-default");
    CHECK(p.schedule.nodes().front().A == 0.0);
    CHECK(p.schedule.nodes().front().B > 0.0);
    CHECK(p.schedule.nodes().front().B == p.schedule.max_B());
    CHECK(preset_by_name("fountain-default").schedule.nodes().size() == p.schedule.nodes().size());
    CHECK_THROWS(preset_by_name("nope"));
}

}  // TEST_SUITE
