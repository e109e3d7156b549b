#include "adiaqnn/evolution.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adiaqnn {

void IntegratorConfig::validate() const {
    if (initial_steps < 2) throw std::invalid_argument("integrator needs at least two initial steps");
    if (refinement_factor < 2) throw std::invalid_argument("refinement factor must be at least 2");
    if (!(tol > 0.0)) throw std::invalid_argument("integrator tolerance must be positive");
    if (max_steps < initial_steps) throw std::invalid_argument("max_steps is below initial_steps");
}

namespace {

void check_samples(const std::vector<double>& samples) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!(samples[k] >= 0.0 && samples[k] <= 1.0))
            throw std::invalid_argument("sample points must lie in [0,1]");
        if (k > 0 && !(samples[k] > samples[k - 1]))
            throw std::invalid_argument("sample points must be strictly increasing");
    }
}

struct Plan {
    std::vector<double> cuts;          // interval boundaries, 0 ... 1
    std::vector<std::size_t> base;     // steps per interval on the first pass
    std::vector<int> sample_at_cut;    // sample index recorded at each cut, or -1
};

// Intervals end at every sample point and at every schedule node, so each
// step sees a single linear segment and samples fall on step boundaries.
Plan make_plan(const FieldSchedule& schedule, const std::vector<double>& samples, std::size_t budget) {
    Plan p;
    p.cuts = {0.0, 1.0};
    for (double s : samples) p.cuts.push_back(s);
    for (const auto& n : schedule.nodes()) p.cuts.push_back(n.s);
    std::sort(p.cuts.begin(), p.cuts.end());
    p.cuts.erase(std::unique(p.cuts.begin(), p.cuts.end()), p.cuts.end());
    for (std::size_t k = 0; k + 1 < p.cuts.size(); ++k) {
        const double len = p.cuts[k + 1] - p.cuts[k];
        const double want = std::ceil(static_cast<double>(budget) * len - 1e-9);
        p.base.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(want)));
    }
    p.sample_at_cut.assign(p.cuts.size(), -1);
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto it = std::lower_bound(p.cuts.begin(), p.cuts.end(), samples[j]);
        p.sample_at_cut[static_cast<std::size_t>(it - p.cuts.begin())] = static_cast<int>(j);
    }
    return p;
}

struct Pass {
    std::vector<ComplexMatrix> samples;
    ComplexMatrix final_state;
    std::size_t steps = 0;
};

Pass run_pass(const ComplexMatrix& psi0, const HamiltonianTerms& terms, const FieldSchedule& schedule, double T,
              const Plan& plan, std::size_t mult, std::size_t n_samples) {
    Pass out;
    out.samples.resize(n_samples);
    RealMatrix re = psi0.real(), im = psi0.imag();
    auto record = [&](std::size_t cut) {
        const int j = plan.sample_at_cut[cut];
        if (j < 0) return;
        ComplexMatrix z(re.rows(), re.cols());
        z.real() = re;
        z.imag() = im;
        out.samples[static_cast<std::size_t>(j)] = std::move(z);
    };
    record(0);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(terms.dim());
    RealMatrix V, gram;
    for (std::size_t k = 0; k + 1 < plan.cuts.size(); ++k) {
        const std::size_t n = plan.base[k] * mult;
        const double a = plan.cuts[k];
        const double h = (plan.cuts[k + 1] - a) / static_cast<double>(n);
        if (T != 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                const Fields f = fields_at(schedule, a + (static_cast<double>(j) + 0.5) * h);
                es.compute(terms.assemble(f.A, f.B1, f.B2));
                if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed during propagation");
                // One Newton-Schulz pass restores orthogonality to rounding
                // level; without it the norm drifts ~1e-15 per step, which
                // adds up over millions of steps.
                V = es.eigenvectors();
                gram.noalias() = V.transpose() * V;
                gram.diagonal().array() -= 1.0;
                V.noalias() -= 0.5 * V * gram;
                const Eigen::ArrayXd theta = -T * h * es.eigenvalues().array();
                const Eigen::ArrayXd c = theta.cos(), sn = theta.sin();
                const RealMatrix r = V.transpose() * re;
                const RealMatrix i = V.transpose() * im;
                re.noalias() = V * ((r.array().colwise() * c) - (i.array().colwise() * sn)).matrix();
                im.noalias() = V * ((r.array().colwise() * sn) + (i.array().colwise() * c)).matrix();
            }
            out.steps += n;
        }
        record(k + 1);
    }
    out.final_state.resize(re.rows(), re.cols());
    out.final_state.real() = re;
    out.final_state.imag() = im;
    if (!out.final_state.allFinite()) throw NumericalError("non-finite amplitudes during propagation");
    return out;
}

struct Setup {
    HamiltonianTerms terms;
    InvariantSubspace sector;
    bool reduced = false;
    ComplexMatrix start;
};

Setup prepare(const ComplexMatrix& psi0, const HamiltonianParams& params) {
    if (psi0.rows() != kDim) throw std::invalid_argument("initial states must have 256 amplitudes");
    for (Eigen::Index c = 0; c < psi0.cols(); ++c)
        if (std::abs(psi0.col(c).norm() - 1.0) > 1e-9) throw std::invalid_argument("initial states must be normalized");
    Setup su;
    su.terms = hamiltonian_terms(params);
    su.sector = InvariantSubspace::for_params(params);
    if (su.sector.leakage(psi0) <= 1e-12) {
        su.reduced = true;
        su.terms = su.sector.project(su.terms);
        su.start = su.sector.restrict(psi0);
    } else {
        su.start = psi0;
    }
    return su;
}

EvolutionResult package(const Setup& su, Pass&& pass, const std::vector<double>& samples, double T,
                        double convergence) {
    EvolutionResult r;
    r.s = samples;
    r.total_time = T;
    r.steps = pass.steps;
    r.convergence = convergence;
    r.reduced = su.reduced;
    r.states.reserve(pass.samples.size());
    for (auto& m : pass.samples) r.states.push_back(su.reduced ? su.sector.lift(m) : std::move(m));
    for (const auto& m : r.states)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (std::abs(m.col(c).norm() - 1.0) > 1e-9) throw NumericalError("norm drift beyond 1e-9 during propagation");
    return r;
}

void check_time(double T) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("total time T must be finite and non-negative");
}

}  // namespace

EvolutionResult evolve_fixed(const ComplexMatrix& psi0, const FieldSchedule& schedule,
                             const HamiltonianParams& params, double T, std::size_t steps,
                             const std::vector<double>& samples) {
    check_time(T);
    check_samples(samples);
    if (steps < 1) throw std::invalid_argument("step count must be positive");
    const Setup su = prepare(psi0, params);
    const Plan plan = make_plan(schedule, samples, steps);
    return package(su, run_pass(su.start, su.terms, schedule, T, plan, 1, samples.size()), samples, T, 0.0);
}

EvolutionResult evolve(const ComplexMatrix& psi0, const FieldSchedule& schedule, const HamiltonianParams& params,
                       double T, const IntegratorConfig& cfg, const std::vector<double>& samples) {
    check_time(T);
    check_samples(samples);
    cfg.validate();
    const Setup su = prepare(psi0, params);
    const Plan plan = make_plan(schedule, samples, cfg.initial_steps);
    if (T == 0.0) return package(su, run_pass(su.start, su.terms, schedule, T, plan, 1, samples.size()), samples, T, 0.0);

    std::size_t mult = 1;
    Pass prev = run_pass(su.start, su.terms, schedule, T, plan, mult, samples.size());
    while (true) {
        mult *= cfg.refinement_factor;
        Pass next = run_pass(su.start, su.terms, schedule, T, plan, mult, samples.size());
        const double dist = (next.final_state - prev.final_state).colwise().norm().maxCoeff();
        if (dist <= cfg.tol) return package(su, std::move(next), samples, T, dist);
        if (next.steps * cfg.refinement_factor > cfg.max_steps) {
            throw ConvergenceError("evolution did not converge: distance " + std::to_string(dist) + " at " +
                                       std::to_string(next.steps) + " steps",
                                   package(su, std::move(next), samples, T, dist));
        }
        prev = std::move(next);
    }
}

EvolutionResult evolve(const StateVector& psi0, const FieldSchedule& schedule, const HamiltonianParams& params,
                       double T, const IntegratorConfig& cfg, const std::vector<double>& samples) {
    return evolve(ComplexMatrix(psi0), schedule, params, T, cfg, samples);
}

double dynamical_phase(const SpectrumTrace& trace, int level, double T) {
    if (trace.size() == 0) throw std::invalid_argument("empty spectrum trace");
    if (level < 0 || level >= trace.snapshots.front().levels()) throw std::invalid_argument("level out of range");
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const auto& a = trace.snapshots[k];
        const auto& b = trace.snapshots[k + 1];
        integral += 0.5 * (b.s - a.s) * (a.energies(level) + b.energies(level));
    }
    return -T * integral;
}

namespace {

double wrap(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phi = std::remainder(phi, two_pi);
    if (phi <= -std::numbers::pi) phi += two_pi;
    return phi;
}

struct Overlaps {
    double arg_sum = 0.0;
    double min_abs = 1.0;
};

Overlaps overlaps(const SpectrumTrace& trace, int level, bool closed) {
    if (trace.size() == 0) throw std::invalid_argument("empty spectrum trace");
    if (level < 0 || level >= trace.snapshots.front().kept())
        throw std::invalid_argument("level has no stored eigenvector");
    Overlaps o;
    auto step = [&](const SpectrumSnapshot& a, const SpectrumSnapshot& b) {
        const Complex ov = a.eigenvectors.col(level).dot(b.eigenvectors.col(level));
        o.arg_sum += std::arg(ov);
        o.min_abs = std::min(o.min_abs, std::abs(ov));
    };
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) step(trace.snapshots[k], trace.snapshots[k + 1]);
    if (closed && trace.size() > 1) step(trace.snapshots.back(), trace.snapshots.front());
    return o;
}

}  // namespace

double berry_phase(const SpectrumTrace& trace, int level, bool closed) {
    return wrap(-overlaps(trace, level, closed).arg_sum);
}

PhaseRecord phase_record(const SpectrumTrace& trace, int level, double T, bool closed) {
    const Overlaps o = overlaps(trace, level, closed);
    PhaseRecord r;
    r.level = level;
    r.dynamical = dynamical_phase(trace, level, T);
    r.berry = wrap(-o.arg_sum);
    r.min_overlap = o.min_abs;
    r.ambiguous = o.min_abs < 0.5;
    return r;
}

PhaseRecord phase_record(int level, const FieldSchedule& schedule, const HamiltonianParams& params, double T,
                         const std::vector<double>& grid, bool symmetric_sector) {
    TraceOptions opts;
    opts.keep = level + 1;
    opts.symmetric_sector = symmetric_sector;
    return phase_record(trace_spectrum(schedule, params, grid, opts), level, T);
}

StateVector adiabatic_reference(const std::vector<Complex>& amplitudes, const SpectrumTrace& trace, double T) {
    if (trace.size() == 0) throw std::invalid_argument("empty spectrum trace");
    double norm2 = 0.0;
    for (const auto& a : amplitudes) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > 1e-9) throw std::invalid_argument("level amplitudes must be normalized");
    const auto& last = trace.snapshots.back();
    if (static_cast<Eigen::Index>(amplitudes.size()) > last.kept())
        throw std::invalid_argument("more amplitudes than stored eigenvectors");
    StateVector out = StateVector::Zero(last.eigenvectors.rows());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (amplitudes[i] == Complex(0.0, 0.0)) continue;
        const PhaseRecord ph = phase_record(trace, static_cast<int>(i), T);
        out += amplitudes[i] * std::polar(1.0, ph.dynamical + ph.berry) * last.eigenvectors.col(static_cast<Eigen::Index>(i));
    }
    return out;
}

StateVector adiabatic_reference(const std::vector<Complex>& amplitudes, const FieldSchedule& schedule,
                                const HamiltonianParams& params, double T, const std::vector<double>& grid,
                                bool symmetric_sector) {
    TraceOptions opts;
    opts.keep = static_cast<Eigen::Index>(amplitudes.size());
    opts.symmetric_sector = symmetric_sector;
    return adiabatic_reference(amplitudes, trace_spectrum(schedule, params, grid, opts), T);
}

double phase_aligned_distance(const StateVector& a, const StateVector& b) {
    const Complex ov = a.dot(b);
    const Complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex(1.0, 0.0);
    return (a * phase - b).norm();
}

}  // namespace adiaqnn
