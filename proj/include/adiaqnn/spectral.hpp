#pragma once

#include "adiaqnn/schedule.hpp"
#include "adiaqnn/spin_core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace adiaqnn {

struct SpectrumSnapshot {
    double s = 0.0;
    Eigen::VectorXd energies;      // ascending, all levels
    ComplexMatrix eigenvectors;    // columns, the lowest `kept` levels only

    Eigen::Index levels() const { return energies.size(); }
    Eigen::Index kept() const { return eigenvectors.cols(); }
    StateVector vector(Eigen::Index level) const { return eigenvectors.col(level); }
};

struct DiagonalizeOptions {
    const SpectrumSnapshot* previous = nullptr;
    // Number of eigenvectors to keep; negative keeps all of them.
    Eigen::Index keep = -1;
    // Degenerate clusters (within tie_tolerance) are ordered by descending
    // overlap with these states, taken in order.
    std::vector<StateVector> tie_references;
    double tie_tolerance = 1e-12;
};

// Throws std::invalid_argument if H deviates from its adjoint by more than
// 1e-12 of its largest entry.
SpectrumSnapshot diagonalize(const ComplexMatrix& H, const DiagonalizeOptions& opts = {});
SpectrumSnapshot diagonalize(const RealMatrix& H, const DiagonalizeOptions& opts = {});

// Puts each kept eigenvector in phase with `previous` (real, non-negative
// overlap), or makes its largest amplitude real positive without one.
void fix_gauge(SpectrumSnapshot& snap, const SpectrumSnapshot* previous);

// Levels must be a contiguous ascending run of indices.
double relevant_gap(const SpectrumSnapshot& snap, std::span<const int> levels);
double relevant_gap(const Eigen::VectorXd& energies, std::span<const int> levels);

struct SpectrumTrace {
    std::vector<SpectrumSnapshot> snapshots;
    // Schedule node positions; the gap has a kink there, so crossing
    // refinement does not fit a parabola across them.
    std::vector<double> kinks;

    std::size_t size() const { return snapshots.size(); }
    std::vector<double> grid() const;
    std::vector<double> gap(int level) const;   // E_{level+1} - E_level
};

struct TraceOptions {
    Eigen::Index keep = 5;
    // Restrict to the symmetric span of the couplings (eigenvectors are
    // lifted back to the full space). Level indices then count only the
    // levels inside that span.
    bool symmetric_sector = false;
    unsigned threads = 1;
};

std::vector<double> uniform_grid(std::size_t points);

SpectrumTrace trace_spectrum(const FieldSchedule& schedule, const HamiltonianParams& params,
                             const std::vector<double>& grid, const TraceOptions& opts = {});

// Generic Hamiltonian family, used for validation fixtures outside the QNN model.
SpectrumTrace trace_family(const std::function<ComplexMatrix(double)>& family,
                           const std::vector<double>& grid, Eigen::Index keep = -1);

struct AvoidedCrossing {
    int lower = 0;            // levels (lower, lower + 1)
    double s_min = 0.0;
    double gap_min = 0.0;
    bool boundary = false;    // refinement fell back to the grid point next to an edge
};

std::vector<AvoidedCrossing> detect_avoided_crossings(const std::vector<double>& grid,
                                                      const std::vector<double>& gap, int lower = 0,
                                                      const std::vector<double>& kinks = {});
std::vector<AvoidedCrossing> detect_avoided_crossings(const SpectrumTrace& trace, int lower);

struct AdiabaticityPoint {
    double s = 0.0;
    double dH_norm = 0.0;
    double gap = 0.0;
    double ratio = 0.0;
    bool divergent = false;
};

struct AdiabaticityReport {
    std::vector<int> levels;
    std::vector<AdiabaticityPoint> points;
    double T_bound = 0.0;       // units hbar/lambda
    double s_at_bound = 0.0;
    double min_gap = 0.0;
    double s_min_gap = 0.0;
    bool divergent = false;
};

AdiabaticityReport adiabatic_time_bound(const FieldSchedule& schedule, const HamiltonianParams& params,
                                        std::span<const int> levels, const std::vector<double>& grid,
                                        unsigned threads = 1);

// Operator norm of dH/ds for a given set of field slopes.
double derivative_norm(const HamiltonianTerms& terms, const Fields& slope);

}  // namespace adiaqnn
