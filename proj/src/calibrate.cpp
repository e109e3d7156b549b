#include "adiaqnn/calibrate.hpp"

#include "adiaqnn/parallel.hpp"
#include "adiaqnn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace adiaqnn {

bool operator<(const CandidateParams& x, const CandidateParams& y) {
    const double xi = x.interior_a.value_or(-INFINITY), yi = y.interior_a.value_or(-INFINITY);
    return std::tie(x.a_max, x.b_max, xi) < std::tie(y.a_max, y.b_max, yi);
}

FieldSchedule apply_candidate(const FieldSchedule& base, const SearchSpace& space, const CandidateParams& c) {
    std::vector<ScheduleNode> nodes = base.nodes();
    const double a0 = base.max_A(), b0 = base.max_B();
    if (c.a_max != a0) {
        if (!(a0 > 0.0)) throw std::invalid_argument("cannot rescale A: base schedule has max A <= 0");
        for (auto& n : nodes) n.A *= c.a_max / a0;
    }
    if (c.b_max != b0) {
        if (!(b0 > 0.0)) throw std::invalid_argument("cannot rescale B: base schedule has max B <= 0");
        for (auto& n : nodes) n.B *= c.b_max / b0;
    }
    if (c.interior_a) {
        if (!space.interior_node || *space.interior_node == 0 || *space.interior_node + 1 >= nodes.size())
            throw std::invalid_argument("interior node index must point at an interior node");
        nodes[*space.interior_node].A = *c.interior_a;
    }
    return FieldSchedule(std::move(nodes), base.ratio1(), base.ratio2());
}

std::vector<CandidateParams> enumerate_candidates(const FieldSchedule& base, const SearchSpace& space) {
    const CandidateParams base_params{base.max_A(), base.max_B(), std::nullopt};
    std::vector<double> as = space.a_max.empty() ? std::vector<double>{base_params.a_max} : space.a_max;
    std::vector<double> bs = space.b_max.empty() ? std::vector<double>{base_params.b_max} : space.b_max;
    std::vector<std::optional<double>> is;
    if (space.interior_a.empty())
        is.push_back(std::nullopt);
    else
        for (double v : space.interior_a) is.push_back(v);

    std::vector<CandidateParams> grid;
    for (double a : as)
        for (double b : bs)
            for (const auto& i : is) grid.push_back({a, b, i});
    std::sort(grid.begin(), grid.end());

    std::vector<CandidateParams> out{base_params};
    for (const auto& c : grid) {
        const bool same_as_base = c.a_max == base_params.a_max && c.b_max == base_params.b_max && !c.interior_a;
        if (!same_as_base) out.push_back(c);
    }
    return out;
}

CandidateEvaluator gate_peak_evaluator(const HamiltonianParams& params, const EvaluatorSettings& settings) {
    return [params, settings](const FieldSchedule& schedule) {
        CandidateMetrics m;
        const AdiabaticityReport rep = adiabatic_time_bound(schedule, params, settings.bound_levels,
                                                            uniform_grid(settings.bound_grid), settings.threads);
        m.min_gap = rep.min_gap;
        m.T_bound = rep.T_bound;
        if (rep.divergent && !settings.fixed_T) return m;
        m.T = settings.fixed_T.value_or(settings.T_multiplier * rep.T_bound);
        const std::vector<double> samples = uniform_grid(settings.samples);
        for (const auto& gate : settings.gates) {
            GatePeak gp{gate.name, 0.0, 0.0, classical_limit(gate.dimension())};
            try {
                const GateExperiment ex =
                    run_gate_experiment(gate, schedule, params, {0.0}, m.T, settings.integrator, samples);
                const FidelitySample p = ex.traces.front().peak();
                gp.peak = p.fidelity;
                gp.s_peak = p.s;
            } catch (const NumericalError&) {
                // Leaves the peak at zero: the candidate cannot win.
            }
            m.peaks.push_back(gp);
        }
        return m;
    };
}

CalibrationResult calibrate(const FieldSchedule& base, const SearchSpace& space, std::size_t budget,
                            const CandidateEvaluator& evaluate, const std::string& name, unsigned threads) {
    if (budget < 1) throw std::invalid_argument("calibration budget must be at least 1");
    std::vector<CandidateParams> cands = enumerate_candidates(base, space);
    if (cands.size() > budget) cands.resize(budget);

    CalibrationResult res;
    res.candidates.resize(cands.size());
    parallel_for(cands.size(), threads, [&](std::size_t k) {
        CalibrationCandidate& c = res.candidates[k];
        c.params = cands[k];
        c.metrics = evaluate(apply_candidate(base, space, cands[k]));
        if (c.metrics.peaks.empty()) return;
        c.objective = INFINITY;
        c.beats_classical = true;
        for (const auto& p : c.metrics.peaks) {
            c.objective = std::min(c.objective, p.peak);
            c.beats_classical = c.beats_classical && p.peak > p.classical_limit;
        }
    });
    std::stable_sort(res.candidates.begin(), res.candidates.end(),
                     [](const CalibrationCandidate& x, const CalibrationCandidate& y) {
                         if (x.objective != y.objective) return x.objective > y.objective;
                         return x.params < y.params;
                     });

    const CalibrationCandidate& top = res.candidates.front();
    res.best.name = name;
    res.best.schedule = apply_candidate(base, space, top.params);
    res.best.metrics["objective"] = top.objective;
    res.best.metrics["min_gap"] = top.metrics.min_gap;
    res.best.metrics["T_bound"] = top.metrics.T_bound;
    res.best.metrics["T"] = top.metrics.T;
    for (const auto& p : top.metrics.peaks) {
        res.best.metrics["peak_" + p.gate] = p.peak;
        if (p.gate == "h") res.best.s_H = p.s_peak;
        if (p.gate == "bell") res.best.s_Bell = p.s_peak;
    }
    res.success = top.beats_classical;
    if (!res.success)
        throw CalibrationFailedError("no candidate schedule beats the classical fidelity limit", std::move(res));
    return res;
}

}  // namespace adiaqnn
