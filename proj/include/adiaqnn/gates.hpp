#pragma once

#include "adiaqnn/evolution.hpp"
#include "adiaqnn/schedule.hpp"
#include "adiaqnn/spin_core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace adiaqnn {

struct LogicalEncoding {
    int dimension = 0;
    std::vector<SpinConfig> states;   // logical basis index -> product state
    // Eigenstate index each logical state must coincide with at s = 0.
    std::vector<int> levels;

    static LogicalEncoding one_qubit();   // |0> = all up, |1> = all down
    // |00> = all up, |01> = uuuudddd, |10> = dddduuuu, |11> = all down
    static LogicalEncoding two_qubit();

    ComplexMatrix basis() const;   // kDim x d
};

struct GateSpec {
    std::string name;
    LogicalEncoding encoding;
    ComplexMatrix target;   // d x d, column j is the image of logical state j

    static GateSpec hadamard_like();
    static GateSpec bell();
    static GateSpec by_name(const std::string& name);   // "h" or "bell"

    int dimension() const { return encoding.dimension; }
    // Target images in the full space, kDim x d.
    ComplexMatrix target_states() const;
};

struct NoiseConfig {
    double epsilon = 0.0;
    void validate() const;
};

StateVector w_state(SpinConfig base);
StateVector apply_local_noise(SpinConfig base, double epsilon);

struct EncodingReport {
    std::vector<double> overlaps;   // |<logical j | E_level(j)(0)>|
    std::vector<double> energies;   // E_level(j)(0)
    bool passed = false;
    std::string diagnostic;
};

EncodingReport verify_encoding(const LogicalEncoding& encoding, const FieldSchedule& schedule,
                               const HamiltonianParams& params);

double classical_limit(int d);

// (|Tr M|^2 + Tr M^dag M) / (d(d+1)), d in {2, 4}.
double gate_fidelity_closed_form(const ComplexMatrix& M);

// M_ij = <target_i | evolved_j>.
ComplexMatrix logical_block(const ComplexMatrix& targets, const ComplexMatrix& evolved);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Haar average of |<target(a)|evolved(a)>|^2 over logical inputs a. Samples
// are split into fixed chunks, each with its own stream derived from the
// seed, so the result does not depend on the thread count.
McEstimate gate_fidelity_mc(const ComplexMatrix& evolved, const GateSpec& gate, std::size_t samples,
                            std::uint64_t seed, unsigned threads = 1);

struct FidelitySample {
    double s = 0.0;
    double fidelity = 0.0;
};

struct FidelityTrace {
    std::string gate;
    double r2 = 0.0;
    double r3 = 0.0;
    double epsilon = 0.0;
    double classical_limit = 0.0;
    std::vector<FidelitySample> samples;

    FidelitySample peak() const;   // first maximum
};

struct GateExperiment {
    EncodingReport encoding;
    std::vector<FidelityTrace> traces;   // one per epsilon, same order as requested
    EvolutionResult evolution;           // columns: encoded basis, then W states of each basis state
    double T = 0.0;

    // Evolved noisy basis (kDim x d) at sample k for the given epsilon.
    ComplexMatrix evolved_basis(std::size_t sample, double epsilon) const;
};

// Evolves the encoded basis states (and their single-flip partners when any
// epsilon > 0) once and scores every sample against the fixed target.
// Throws NumericalError if the encoding check fails.
GateExperiment run_gate_experiment(const GateSpec& gate, const FieldSchedule& schedule,
                                   const HamiltonianParams& params, const std::vector<double>& epsilons, double T,
                                   const IntegratorConfig& cfg, const std::vector<double>& samples);

}  // namespace adiaqnn
