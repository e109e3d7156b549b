#pragma once

#include "adiaqnn/evolution.hpp"
#include "adiaqnn/gates.hpp"
#include "adiaqnn/schedule.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adiaqnn {

// Candidate schedules are the base schedule with its A values rescaled so
// that max A equals a_max, its B values rescaled so that max B equals b_max,
// and optionally the A value of one interior node replaced.
struct SearchSpace {
    std::vector<double> a_max;   // empty: keep the base value
    std::vector<double> b_max;
    std::optional<std::size_t> interior_node;
    std::vector<double> interior_a;
};

struct CandidateParams {
    double a_max = 0.0;
    double b_max = 0.0;
    std::optional<double> interior_a;

    friend bool operator<(const CandidateParams& x, const CandidateParams& y);
};

FieldSchedule apply_candidate(const FieldSchedule& base, const SearchSpace& space, const CandidateParams& c);

// Enumerated in lexicographic order; the base schedule itself comes first.
std::vector<CandidateParams> enumerate_candidates(const FieldSchedule& base, const SearchSpace& space);

struct GatePeak {
    std::string gate;
    double peak = 0.0;
    double s_peak = 0.0;
    double classical_limit = 0.0;
};

struct CandidateMetrics {
    std::vector<GatePeak> peaks;
    double min_gap = 0.0;      // smallest gap (0,1) or (2,3) over the scan
    double T_bound = 0.0;
    double T = 0.0;
};

struct CalibrationCandidate {
    CandidateParams params;
    CandidateMetrics metrics;
    double objective = 0.0;    // min over gates of the peak fidelity
    bool beats_classical = false;
};

struct CalibrationResult {
    SchedulePreset best;
    std::vector<CalibrationCandidate> candidates;   // sorted by objective, best first
    bool success = false;
};

using CandidateEvaluator = std::function<CandidateMetrics(const FieldSchedule&)>;

struct EvaluatorSettings {
    std::vector<GateSpec> gates;
    double T_multiplier = 100.0;
    std::optional<double> fixed_T;   // overrides the multiplier
    std::vector<int> bound_levels{0, 1};
    std::size_t bound_grid = 1001;
    std::size_t samples = 1001;
    IntegratorConfig integrator;
    unsigned threads = 1;
};

// Peak fidelity of each gate at T = multiplier * T_bound.
CandidateEvaluator gate_peak_evaluator(const HamiltonianParams& params, const EvaluatorSettings& settings);

// Evaluates at most `budget` candidates. Throws CalibrationFailed (with the
// result attached) when no candidate beats the classical limit of every gate.
CalibrationResult calibrate(const FieldSchedule& base, const SearchSpace& space, std::size_t budget,
                            const CandidateEvaluator& evaluate, const std::string& name = "calibrated",
                            unsigned threads = 1);

class CalibrationFailedError : public CalibrationFailed {
public:
    CalibrationFailedError(const std::string& what, CalibrationResult r)
        : CalibrationFailed(what), result_(std::move(r)) {}
    const CalibrationResult& result() const { return result_; }

private:
    CalibrationResult result_;
};

}  // namespace adiaqnn
