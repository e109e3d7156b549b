#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace adiaqnn {

inline constexpr int kIons = 8;
inline constexpr int kDim = 256;

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Product configuration of the eight ions. Ion 1 is the most significant
// bit of the index, a set bit means spin up.
class SpinConfig {
public:
    constexpr SpinConfig() = default;
    constexpr explicit SpinConfig(std::uint8_t index) : index_(index) {}

    static SpinConfig from_spins(const std::array<bool, kIons>& up);
    // 'u'/'d' (or '1'/'0') per ion, ion 1 first, e.g. "uuuudddd".
    static SpinConfig from_string(const std::string& spins);

    static constexpr SpinConfig all_up() { return SpinConfig(0xFF); }
    static constexpr SpinConfig all_down() { return SpinConfig(0x00); }

    constexpr std::uint8_t index() const { return index_; }
    bool up(int ion) const;           // ion in 1..8
    int sigma_z(int ion) const;       // +1 or -1
    SpinConfig flipped(int ion) const;
    std::string to_string() const;

    friend constexpr bool operator==(SpinConfig, SpinConfig) = default;

private:
    std::uint8_t index_ = 0;
};

StateVector basis_state(SpinConfig c);

struct HamiltonianParams {
    double lambda = 1.0;
    double r1 = 10.0;
    double r2 = 9.5;
    double r3 = 0.0;
    double A = 0.0;
    double B1 = 0.0;
    double B2 = 0.0;
    // Replaces the third collective term by ((S1-S2)-(S3-S4))^2.
    bool r3_symmetric = false;

    // Throws std::invalid_argument on non-finite values or lambda <= 0.
    void validate() const;
};

enum class TrapKind { fountain, harmonic };

struct TrapPreset {
    TrapKind kind = TrapKind::fountain;
    std::string name;
    double r1 = 0.0;
    double r2 = 0.0;

    static TrapPreset fountain();   // r1 = 10, r2 = 9.5
    static TrapPreset harmonic();   // r1 = 10, r2 = 0 (r2 is the noise knob)
    static TrapPreset by_name(const std::string& name);

    HamiltonianParams params(double r3 = 0.0, double lambda = 1.0) const;
};

enum class Axis { x, y, z };

// S_{alpha,pair} = sigma_alpha(2 pair - 1) + sigma_alpha(2 pair), pair in 1..4.
ComplexMatrix build_collective(Axis axis, int pair);

// Real symmetric in the configuration basis.
RealMatrix build_hamiltonian(const HamiltonianParams& p);

// Diagonal element of H for a single configuration (all field terms
// except A contribute).
double diagonal_energy(SpinConfig c, const HamiltonianParams& p);

// H = coupling + A * x_field + B1 * z12 + B2 * z34, with lambda folded in.
// Cached pieces so that sweeps over the fields only rescale.
struct HamiltonianTerms {
    RealMatrix coupling;
    RealMatrix x_field;
    RealMatrix z12;
    RealMatrix z34;

    RealMatrix assemble(double A, double B1, double B2) const;
    RealMatrix derivative(double dA, double dB1, double dB2) const;
    Eigen::Index dim() const { return coupling.rows(); }
};

HamiltonianTerms hamiltonian_terms(const HamiltonianParams& p);

// Span of configurations that are symmetric under permutations of ions
// inside each group. Any H whose couplings only involve group sums
// commutes with those permutations and so leaves this span invariant.
class InvariantSubspace {
public:
    InvariantSubspace() = default;
    explicit InvariantSubspace(std::vector<std::vector<int>> groups);

    // Largest symmetric span for the given couplings.
    static InvariantSubspace for_params(const HamiltonianParams& p);

    const RealMatrix& basis() const { return basis_; }   // kDim x dim(), orthonormal columns
    Eigen::Index dim() const { return basis_.cols(); }
    const std::vector<std::vector<int>>& groups() const { return groups_; }

    RealMatrix project(const RealMatrix& op) const;
    HamiltonianTerms project(const HamiltonianTerms& t) const;
    ComplexMatrix restrict(const ComplexMatrix& states) const;
    ComplexMatrix lift(const ComplexMatrix& reduced) const;
    // Largest norm of the component orthogonal to the span over all columns.
    double leakage(const ComplexMatrix& states) const;

private:
    std::vector<std::vector<int>> groups_;
    RealMatrix basis_;
};

}  // namespace adiaqnn
