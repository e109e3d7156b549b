#include "adiaqnn/gates.hpp"

#include "adiaqnn/parallel.hpp"
#include "adiaqnn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace adiaqnn {

LogicalEncoding LogicalEncoding::one_qubit() {
    return {2, {SpinConfig::all_up(), SpinConfig::all_down()}, {0, 1}};
}

LogicalEncoding LogicalEncoding::two_qubit() {
    return {4,
            {SpinConfig::all_up(), SpinConfig::from_string("uuuudddd"), SpinConfig::from_string("dddduuuu"),
             SpinConfig::all_down()},
            {0, 2, 3, 1}};
}

ComplexMatrix LogicalEncoding::basis() const {
    ComplexMatrix B = ComplexMatrix::Zero(kDim, dimension);
    for (int j = 0; j < dimension; ++j) B(states[j].index(), j) = 1.0;
    return B;
}

GateSpec GateSpec::hadamard_like() {
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix V(2, 2);
    V << r, -r,
         r, r;
    return {"h", LogicalEncoding::one_qubit(), V};
}

GateSpec GateSpec::bell() {
    const double r = 1.0 / std::sqrt(2.0);
    // logical order 00, 01, 10, 11
    ComplexMatrix V(4, 4);
    V << r, 0, 0, -r,
         0, r, -r, 0,
         0, r, r, 0,
         r, 0, 0, r;
    return {"bell", LogicalEncoding::two_qubit(), V};
}

GateSpec GateSpec::by_name(const std::string& name) {
    if (name == "h") return hadamard_like();
    if (name == "bell") return bell();
    throw std::invalid_argument("unknown gate '" + name + "' (expected h or bell)");
}

ComplexMatrix GateSpec::target_states() const { return encoding.basis() * target; }

void NoiseConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite and >= 0");
}

StateVector w_state(SpinConfig base) {
    StateVector w = StateVector::Zero(kDim);
    const double a = 1.0 / std::sqrt(static_cast<double>(kIons));
    for (int ion = 1; ion <= kIons; ++ion) w(base.flipped(ion).index()) = a;
    return w;
}

StateVector apply_local_noise(SpinConfig base, double epsilon) {
    NoiseConfig{epsilon}.validate();
    StateVector v = w_state(base) * epsilon;
    v(base.index()) = 1.0;
    return v / std::sqrt(1.0 + epsilon * epsilon);
}

EncodingReport verify_encoding(const LogicalEncoding& encoding, const FieldSchedule& schedule,
                               const HamiltonianParams& params) {
    HamiltonianParams p = params;
    const Fields f = fields_at(schedule, 0.0);
    p.A = f.A;
    p.B1 = f.B1;
    p.B2 = f.B2;
    DiagonalizeOptions opts;
    for (const auto& c : encoding.states) opts.tie_references.push_back(basis_state(c));
    const SpectrumSnapshot snap = diagonalize(build_hamiltonian(p), opts);

    EncodingReport rep;
    rep.passed = true;
    std::ostringstream diag;
    for (int j = 0; j < encoding.dimension; ++j) {
        const int level = encoding.levels[j];
        const double ov = std::abs(snap.eigenvectors(encoding.states[j].index(), level));
        rep.overlaps.push_back(ov);
        rep.energies.push_back(snap.energies(level));
        if (ov < 0.99) {
            rep.passed = false;
            diag << "logical state " << j << " (" << encoding.states[j].to_string() << ") has overlap " << ov
                 << " with level " << level << "; ";
        }
    }
    rep.diagnostic = rep.passed ? "encoding verified" : diag.str();
    return rep;
}

double classical_limit(int d) {
    if (d < 1) throw std::invalid_argument("dimension must be at least 1");
    return 2.0 / (d + 1.0);
}

double gate_fidelity_closed_form(const ComplexMatrix& M) {
    const Eigen::Index d = M.rows();
    if (M.cols() != d || (d != 2 && d != 4)) throw std::invalid_argument("logical block must be 2x2 or 4x4");
    const double f = (std::norm(M.trace()) + M.squaredNorm()) / static_cast<double>(d * (d + 1));
    return std::clamp(f, 0.0, 1.0);
}

ComplexMatrix logical_block(const ComplexMatrix& targets, const ComplexMatrix& evolved) {
    if (targets.rows() != evolved.rows() || targets.cols() != evolved.cols())
        throw std::invalid_argument("target and evolved maps differ in shape");
    return targets.adjoint() * evolved;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::size_t kChunk = 1024;

}  // namespace

McEstimate gate_fidelity_mc(const ComplexMatrix& evolved, const GateSpec& gate, std::size_t samples,
                            std::uint64_t seed, unsigned threads) {
    if (samples < 1) throw std::invalid_argument("at least one Monte-Carlo sample is required");
    const ComplexMatrix M = logical_block(gate.target_states(), evolved);
    const Eigen::Index d = M.rows();
    const std::size_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<double> sum(chunks, 0.0), sum2(chunks, 0.0);
    parallel_for(chunks, threads, [&](std::size_t c) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(c)));
        std::normal_distribution<double> normal;
        const std::size_t n = std::min(kChunk, samples - c * kChunk);
        Eigen::VectorXcd a(d);
        for (std::size_t k = 0; k < n; ++k) {
            for (Eigen::Index i = 0; i < d; ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                a(i) = Complex(re, im);
            }
            a.normalize();
            const double f = std::norm(a.dot(M * a));
            sum[c] += f;
            sum2[c] += f * f;
        }
    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        s += sum[c];
        s2 += sum2[c];
    }
    const double n = static_cast<double>(samples);
    McEstimate est;
    est.mean = s / n;
    if (samples > 1) {
        const double var = std::max(0.0, (s2 - n * est.mean * est.mean) / (n - 1.0));
        est.std_error = std::sqrt(var / n);
    }
    return est;
}

FidelitySample FidelityTrace::peak() const {
    if (samples.empty()) throw std::logic_error("empty fidelity trace");
    FidelitySample best = samples.front();
    for (const auto& x : samples)
        if (x.fidelity > best.fidelity) best = x;
    return best;
}

ComplexMatrix GateExperiment::evolved_basis(std::size_t sample, double epsilon) const {
    const ComplexMatrix& all = evolution.states.at(sample);
    const Eigen::Index d = static_cast<Eigen::Index>(encoding.overlaps.size());
    if (epsilon == 0.0) return all.leftCols(d);
    if (all.cols() < 2 * d) throw std::logic_error("experiment was run without local-noise partners");
    return (all.leftCols(d) + epsilon * all.middleCols(d, d)) / std::sqrt(1.0 + epsilon * epsilon);
}

GateExperiment run_gate_experiment(const GateSpec& gate, const FieldSchedule& schedule,
                                   const HamiltonianParams& params, const std::vector<double>& epsilons, double T,
                                   const IntegratorConfig& cfg, const std::vector<double>& samples) {
    if (epsilons.empty()) throw std::invalid_argument("at least one epsilon value is required");
    bool noisy = false;
    for (double e : epsilons) {
        NoiseConfig{e}.validate();
        noisy = noisy || e > 0.0;
    }
    GateExperiment ex;
    ex.T = T;
    ex.encoding = verify_encoding(gate.encoding, schedule, params);
    if (!ex.encoding.passed) throw NumericalError("encoding verification failed: " + ex.encoding.diagnostic);

    const int d = gate.dimension();
    ComplexMatrix inputs(kDim, noisy ? 2 * d : d);
    inputs.leftCols(d) = gate.encoding.basis();
    if (noisy)
        for (int j = 0; j < d; ++j) inputs.col(d + j) = w_state(gate.encoding.states[j]);
    ex.evolution = evolve(inputs, schedule, params, T, cfg, samples);

    const ComplexMatrix targets = gate.target_states();
    for (double e : epsilons) {
        FidelityTrace tr;
        tr.gate = gate.name;
        tr.r2 = params.r2;
        tr.r3 = params.r3;
        tr.epsilon = e;
        tr.classical_limit = classical_limit(d);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const ComplexMatrix M = logical_block(targets, ex.evolved_basis(k, e));
            tr.samples.push_back({samples[k], gate_fidelity_closed_form(M)});
        }
        ex.traces.push_back(std::move(tr));
    }
    return ex;
}

}  // namespace adiaqnn
