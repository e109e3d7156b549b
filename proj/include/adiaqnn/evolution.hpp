#pragma once

#include "adiaqnn/errors.hpp"
#include "adiaqnn/schedule.hpp"
#include "adiaqnn/spectral.hpp"
#include "adiaqnn/spin_core.hpp"

#include <vector>

namespace adiaqnn {

struct IntegratorConfig {
    // Step budget over the whole of [0,1] for the first pass.
    std::size_t initial_steps = 4096;
    std::size_t refinement_factor = 2;
    // Largest column-wise distance between final states of successive passes.
    double tol = 1e-2;
    std::size_t max_steps = std::size_t{1} << 22;

    void validate() const;   // throws std::invalid_argument
};

struct EvolutionResult {
    std::vector<double> s;
    std::vector<ComplexMatrix> states;   // one matrix per sample, one column per input state
    double total_time = 0.0;             // units hbar/lambda
    std::size_t steps = 0;
    double convergence = 0.0;            // distance to the previous refinement
    bool reduced = false;                // propagated inside the symmetric sector

    StateVector state(std::size_t sample, Eigen::Index column = 0) const { return states[sample].col(column); }
};

// Thrown when the refinement loop exceeds max_steps.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, EvolutionResult best)
        : NumericalError(what), best_(std::move(best)) {}
    const EvolutionResult& best() const { return best_; }
    double distance() const { return best_.convergence; }

private:
    EvolutionResult best_;
};

// Integrates i d/ds psi = T H(s) psi (hbar = 1) with midpoint exponential
// steps. Columns of psi0 are evolved together under the same step sequence.
// Sample points must lie in [0,1] and be strictly increasing.
EvolutionResult evolve(const ComplexMatrix& psi0, const FieldSchedule& schedule, const HamiltonianParams& params,
                       double T, const IntegratorConfig& cfg, const std::vector<double>& samples);

EvolutionResult evolve(const StateVector& psi0, const FieldSchedule& schedule, const HamiltonianParams& params,
                       double T, const IntegratorConfig& cfg, const std::vector<double>& samples);

// One pass with a fixed step budget, no refinement.
EvolutionResult evolve_fixed(const ComplexMatrix& psi0, const FieldSchedule& schedule,
                             const HamiltonianParams& params, double T, std::size_t steps,
                             const std::vector<double>& samples);

struct PhaseRecord {
    int level = 0;
    double dynamical = 0.0;
    double berry = 0.0;          // wrapped to (-pi, pi]
    double min_overlap = 1.0;    // smallest |<v_k|v_k+1>| along the grid
    bool ambiguous = false;      // min_overlap < 0.5
};

// Dynamical phase -T * int E_level ds (trapezoid), from an existing trace.
double dynamical_phase(const SpectrumTrace& trace, int level, double T);
// Berry phase -arg prod <v_k|v_k+1>. If `closed`, the last snapshot is
// joined back to the first (the path must return to its start).
double berry_phase(const SpectrumTrace& trace, int level, bool closed = false);
PhaseRecord phase_record(const SpectrumTrace& trace, int level, double T, bool closed = false);

// Same, building the trace along the schedule. The symmetric sector is used
// by default since encoded states never leave it; level indices then refer
// to levels inside that sector.
PhaseRecord phase_record(int level, const FieldSchedule& schedule, const HamiltonianParams& params, double T,
                         const std::vector<double>& grid, bool symmetric_sector = true);

// sum_i a_i exp(i(PhiD_i + PhiB_i)) |E_i(1)>, with a_i the amplitudes on
// the gauge-fixed eigenvectors at s = 0.
StateVector adiabatic_reference(const std::vector<Complex>& amplitudes, const SpectrumTrace& trace, double T);
StateVector adiabatic_reference(const std::vector<Complex>& amplitudes, const FieldSchedule& schedule,
                                const HamiltonianParams& params, double T, const std::vector<double>& grid,
                                bool symmetric_sector = true);

// Distance after removing the best global phase.
double phase_aligned_distance(const StateVector& a, const StateVector& b);

}  // namespace adiaqnn
