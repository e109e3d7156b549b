#include "adiaqnn/spin_core.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace adiaqnn {

namespace {

void check_ion(int ion) {
    if (ion < 1 || ion > kIons) throw std::invalid_argument("ion index must be in 1..8");
}

// Pair S_z eigenvalue, pair in 1..4.
int pair_z(SpinConfig c, int pair) { return c.sigma_z(2 * pair - 1) + c.sigma_z(2 * pair); }

double coupling_energy(SpinConfig c, const HamiltonianParams& p) {
    const double s1 = pair_z(c, 1), s2 = pair_z(c, 2), s3 = pair_z(c, 3), s4 = pair_z(c, 4);
    const double total = s1 + s2 + s3 + s4;
    const double split = (s1 + s2) - (s3 + s4);
    const double third = p.r3_symmetric ? (s1 - s2) - (s3 - s4) : (s1 - s2) - (s3 + s4);
    return -p.lambda * (p.r1 * total * total + p.r2 * split * split + p.r3 * third * third);
}

}  // namespace

SpinConfig SpinConfig::from_spins(const std::array<bool, kIons>& up) {
    std::uint8_t idx = 0;
    for (int ion = 1; ion <= kIons; ++ion)
        if (up[ion - 1]) idx |= static_cast<std::uint8_t>(1u << (kIons - ion));
    return SpinConfig(idx);
}

SpinConfig SpinConfig::from_string(const std::string& spins) {
    if (spins.size() != kIons) throw std::invalid_argument("spin string must have 8 characters");
    std::array<bool, kIons> up{};
    for (int i = 0; i < kIons; ++i) {
        const char ch = spins[i];
        if (ch == 'u' || ch == 'U' || ch == '1')
            up[i] = true;
        else if (ch == 'd' || ch == 'D' || ch == '0')
            up[i] = false;
        else
            throw std::invalid_argument("spin string may only contain u/d/1/0");
    }
    return from_spins(up);
}

bool SpinConfig::up(int ion) const {
    check_ion(ion);
    return (index_ >> (kIons - ion)) & 1u;
}

int SpinConfig::sigma_z(int ion) const { return up(ion) ? 1 : -1; }

SpinConfig SpinConfig::flipped(int ion) const {
    check_ion(ion);
    return SpinConfig(static_cast<std::uint8_t>(index_ ^ (1u << (kIons - ion))));
}

std::string SpinConfig::to_string() const {
    std::string out(kIons, 'd');
    for (int ion = 1; ion <= kIons; ++ion)
        if (up(ion)) out[ion - 1] = 'u';
    return out;
}

StateVector basis_state(SpinConfig c) {
    StateVector v = StateVector::Zero(kDim);
    v(c.index()) = 1.0;
    return v;
}

void HamiltonianParams::validate() const {
    for (double v : {lambda, r1, r2, r3, A, B1, B2})
        if (!std::isfinite(v)) throw std::invalid_argument("Hamiltonian parameters must be finite");
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    if (r1 < 0.0 || r2 < 0.0 || r3 < 0.0) throw std::invalid_argument("couplings r1, r2, r3 must be non-negative");
}

TrapPreset TrapPreset::fountain() { return {TrapKind::fountain, "fountain", 10.0, 9.5}; }
TrapPreset TrapPreset::harmonic() { return {TrapKind::harmonic, "harmonic", 10.0, 0.0}; }

TrapPreset TrapPreset::by_name(const std::string& name) {
    if (name == "fountain") return fountain();
    if (name == "harmonic") return harmonic();
    throw std::invalid_argument("unknown trap preset '" + name + "'");
}

HamiltonianParams TrapPreset::params(double r3, double lambda) const {
    HamiltonianParams p;
    p.lambda = lambda;
    p.r1 = r1;
    p.r2 = r2;
    p.r3 = r3;
    return p;
}

ComplexMatrix build_collective(Axis axis, int pair) {
    if (pair < 1 || pair > 4) throw std::invalid_argument("pair index must be in 1..4");
    ComplexMatrix S = ComplexMatrix::Zero(kDim, kDim);
    for (int idx = 0; idx < kDim; ++idx) {
        const SpinConfig c(static_cast<std::uint8_t>(idx));
        for (int ion : {2 * pair - 1, 2 * pair}) {
            switch (axis) {
                case Axis::z:
                    S(idx, idx) += static_cast<double>(c.sigma_z(ion));
                    break;
                case Axis::x:
                    S(c.flipped(ion).index(), idx) += 1.0;
                    break;
                case Axis::y:
                    // sigma_y |up> = i|down>, sigma_y |down> = -i|up>
                    S(c.flipped(ion).index(), idx) += Complex(0.0, c.up(ion) ? 1.0 : -1.0);
                    break;
            }
        }
    }
    return S;
}

double diagonal_energy(SpinConfig c, const HamiltonianParams& p) {
    const double s12 = pair_z(c, 1) + pair_z(c, 2);
    const double s34 = pair_z(c, 3) + pair_z(c, 4);
    return coupling_energy(c, p) - p.lambda * (p.B1 * s12 + p.B2 * s34);
}

HamiltonianTerms hamiltonian_terms(const HamiltonianParams& p) {
    p.validate();
    HamiltonianTerms t;
    t.coupling = RealMatrix::Zero(kDim, kDim);
    t.x_field = RealMatrix::Zero(kDim, kDim);
    t.z12 = RealMatrix::Zero(kDim, kDim);
    t.z34 = RealMatrix::Zero(kDim, kDim);
    for (int idx = 0; idx < kDim; ++idx) {
        const SpinConfig c(static_cast<std::uint8_t>(idx));
        t.coupling(idx, idx) = coupling_energy(c, p);
        t.z12(idx, idx) = -p.lambda * (pair_z(c, 1) + pair_z(c, 2));
        t.z34(idx, idx) = -p.lambda * (pair_z(c, 3) + pair_z(c, 4));
        for (int ion = 1; ion <= kIons; ++ion) t.x_field(c.flipped(ion).index(), idx) = -p.lambda;
    }
    return t;
}

RealMatrix HamiltonianTerms::assemble(double A, double B1, double B2) const {
    return coupling + A * x_field + B1 * z12 + B2 * z34;
}

RealMatrix HamiltonianTerms::derivative(double dA, double dB1, double dB2) const {
    return dA * x_field + dB1 * z12 + dB2 * z34;
}

RealMatrix build_hamiltonian(const HamiltonianParams& p) {
    return hamiltonian_terms(p).assemble(p.A, p.B1, p.B2);
}

InvariantSubspace::InvariantSubspace(std::vector<std::vector<int>> groups) : groups_(std::move(groups)) {
    std::vector<bool> seen(kIons + 1, false);
    for (const auto& g : groups_)
        for (int ion : g) {
            check_ion(ion);
            if (seen[ion]) throw std::invalid_argument("ion listed in more than one group");
            seen[ion] = true;
        }
    for (int ion = 1; ion <= kIons; ++ion)
        if (!seen[ion]) groups_.push_back({ion});

    // Orbits are labelled by the number of up spins in each group.
    std::map<std::vector<int>, std::vector<int>> orbits;
    for (int idx = 0; idx < kDim; ++idx) {
        const SpinConfig c(static_cast<std::uint8_t>(idx));
        std::vector<int> key;
        for (const auto& g : groups_) {
            int ups = 0;
            for (int ion : g) ups += c.up(ion) ? 1 : 0;
            key.push_back(ups);
        }
        orbits[key].push_back(idx);
    }
    basis_ = RealMatrix::Zero(kDim, static_cast<Eigen::Index>(orbits.size()));
    Eigen::Index col = 0;
    for (const auto& [key, members] : orbits) {
        const double w = 1.0 / std::sqrt(static_cast<double>(members.size()));
        for (int idx : members) basis_(idx, col) = w;
        ++col;
    }
}

InvariantSubspace InvariantSubspace::for_params(const HamiltonianParams& p) {
    if (p.r3 == 0.0) return InvariantSubspace({{1, 2, 3, 4}, {5, 6, 7, 8}});
    if (p.r3_symmetric) return InvariantSubspace({{1, 2}, {3, 4}, {5, 6}, {7, 8}});
    return InvariantSubspace({{1, 2}, {3, 4}, {5, 6, 7, 8}});
}

RealMatrix InvariantSubspace::project(const RealMatrix& op) const { return basis_.transpose() * op * basis_; }

HamiltonianTerms InvariantSubspace::project(const HamiltonianTerms& t) const {
    return {project(t.coupling), project(t.x_field), project(t.z12), project(t.z34)};
}

ComplexMatrix InvariantSubspace::restrict(const ComplexMatrix& states) const {
    return basis_.transpose().cast<Complex>() * states;
}

ComplexMatrix InvariantSubspace::lift(const ComplexMatrix& reduced) const {
    return basis_.cast<Complex>() * reduced;
}

double InvariantSubspace::leakage(const ComplexMatrix& states) const {
    const ComplexMatrix rest = states - lift(restrict(states));
    return rest.cols() == 0 ? 0.0 : rest.colwise().norm().maxCoeff();
}

}  // namespace adiaqnn
