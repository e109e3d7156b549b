#include "adiaqnn/calibrate.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>

using namespace adiaqnn;

namespace {

FieldSchedule base() { return FieldSchedule({{0.0, 0.0, 1e5}, {0.4, 24.0, 1e5}, {0.5, 24.0, 0.0}, {1.0, 30.0, 0.0}}); }

// Peak grows with a_max and falls off away from interior A = 22.
CandidateMetrics fake(const FieldSchedule& s) {
    CandidateMetrics m;
    const double a = s.max_A(), i = s.nodes()[1].A;
    m.peaks.push_back({"h", 0.7 + 0.001 * a - 0.001 * std::abs(i - 22.0), 0.5, 2.0 / 3.0});
    m.T_bound = 1.0;
    m.T = 100.0;
    m.min_gap = 0.1;
    return m;
}

}  // namespace

TEST_SUITE("calibrate") {

TEST_CASE("candidate schedules") {
    SearchSpace sp;
    sp.a_max = {27.0, 33.0};
    sp.b_max = {2e5};
    sp.interior_node = 1;
    sp.interior_a = {20.0};
    const FieldSchedule c = apply_candidate(base(), sp, {33.0, 2e5, 20.0});
    CHECK(c.max_A() == doctest::Approx(33.0));
    CHECK(c.max_B() == doctest::Approx(2e5));
    CHECK(c.nodes()[1].A == 20.0);
    CHECK(c.nodes()[2].A == doctest::Approx(24.0 * 1.1));
    CHECK(c.ratio1() == base().ratio1());

    const auto cands = enumerate_candidates(base(), sp);
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].a_max == 30.0);
    CHECK_FALSE(cands[0].interior_a);
    CHECK(cands[1].a_max == 27.0);
    CHECK(cands[2].a_max == 33.0);

    SearchSpace bad = sp;
    bad.interior_node = 0;
    CHECK_THROWS_AS(apply_candidate(base(), bad, {30.0, 1e5, 20.0}), std::invalid_argument);
}

TEST_CASE("budget of one evaluates only the base schedule") {
    SearchSpace sp;
    sp.a_max = {27.0, 33.0};
    std::atomic<int> calls{0};
    const auto res = calibrate(base(), sp, 1, [&](const FieldSchedule& s) {
        ++calls;
        return fake(s);
    });
    CHECK(calls == 1);
    CHECK(res.candidates.size() == 1);
    CHECK(res.best.schedule.max_A() == 30.0);
    CHECK_THROWS_AS(calibrate(base(), sp, 0, fake), std::invalid_argument);
}

TEST_CASE("candidates are ranked by objective") {
    SearchSpace sp;
    sp.a_max = {27.0, 30.0, 33.0};
    sp.interior_node = 1;
    sp.interior_a = {22.0, 24.0, 26.0};
    const auto res = calibrate(base(), sp, 100, fake, "test", 3);
    CHECK(res.success);
    CHECK(res.candidates.size() == 10);
    CHECK(res.candidates.front().params.a_max == 33.0);
    CHECK(*res.candidates.front().params.interior_a == 22.0);
    for (std::size_t k = 1; k < res.candidates.size(); ++k)
        CHECK(res.candidates[k - 1].objective >= res.candidates[k].objective);
    CHECK(res.best.name == "test");
    CHECK(res.best.s_H.value() == 0.5);
    CHECK_FALSE(res.best.s_Bell);
    CHECK(res.best.metrics.at("peak_h") == doctest::Approx(0.733));
    CHECK(res.best.schedule.nodes()[1].A == 22.0);
}

TEST_CASE("ties keep lexicographic order") {
    SearchSpace sp;
    sp.a_max = {33.0, 27.0};
    const auto res = calibrate(base(), sp, 10, [](const FieldSchedule&) {
        CandidateMetrics m;
        m.peaks.push_back({"h", 0.9, 0.5, 2.0 / 3.0});
        return m;
    });
    CHECK(res.candidates[0].params.a_max == 27.0);
    CHECK(res.candidates[1].params.a_max == 30.0);
    CHECK(res.candidates[2].params.a_max == 33.0);
}

TEST_CASE("failure carries the ranked result") {
    SearchSpace sp;
    sp.a_max = {27.0};
    auto below = [](const FieldSchedule& s) {
        CandidateMetrics m;
        m.peaks.push_back({"h", 0.5 + 0.001 * s.max_A(), 0.5, 2.0 / 3.0});
        m.peaks.push_back({"bell", 0.9, 0.5, 0.4});
        return m;
    };
    try {
        calibrate(base(), sp, 5, below);
        FAIL("expected CalibrationFailedError");
    } catch (const CalibrationFailedError& e) {
        CHECK(e.exit_code() == ExitCode::calibration_failed);
        CHECK_FALSE(e.result().success);
        CHECK(e.result().candidates.size() == 2);
        CHECK(e.result().candidates[0].objective == doctest::Approx(0.53));
        CHECK_FALSE(e.result().candidates[0].beats_classical);
    }
}

}  // TEST_SUITE
