#include "adiaqnn/spectral.hpp"

#include "adiaqnn/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace adiaqnn {

namespace {

template <class Matrix>
void check_hermitian(const Matrix& H) {
    if (H.rows() != H.cols()) throw std::invalid_argument("Hamiltonian must be square");
    const double scale = H.cwiseAbs().maxCoeff();
    const double dev = (H - H.adjoint()).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-12 * scale)) throw std::invalid_argument("Hamiltonian is not Hermitian within tolerance");
}

// Replaces each degenerate cluster by the orthonormalized projections of the
// reference states onto the cluster span, in reference order.
void order_ties(const Eigen::VectorXd& energies, ComplexMatrix& vecs, const DiagonalizeOptions& opts,
                double scale) {
    if (opts.tie_references.empty()) return;
    const double tol = opts.tie_tolerance * std::max(1.0, scale);
    const Eigen::Index n = energies.size();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && energies(end) - energies(end - 1) <= tol) ++end;
        const Eigen::Index size = end - start;
        if (size > 1) {
            const ComplexMatrix span = vecs.middleCols(start, size);
            ComplexMatrix chosen(vecs.rows(), 0);
            auto add = [&](StateVector v) {
                if (chosen.cols() > 0) v -= chosen * (chosen.adjoint() * v);
                const double nrm = v.norm();
                if (nrm < 1e-6) return;
                chosen.conservativeResize(Eigen::NoChange, chosen.cols() + 1);
                chosen.col(chosen.cols() - 1) = v / nrm;
            };
            for (const auto& ref : opts.tie_references) {
                if (chosen.cols() == size) break;
                if (ref.size() != vecs.rows()) continue;
                add(span * (span.adjoint() * ref));
            }
            for (Eigen::Index k = 0; k < size && chosen.cols() < size; ++k) add(span.col(k));
            vecs.middleCols(start, size) = chosen;
        }
        start = end;
    }
}

SpectrumSnapshot finish(Eigen::VectorXd energies, ComplexMatrix vecs, const DiagonalizeOptions& opts,
                        double scale) {
    order_ties(energies, vecs, opts, scale);
    SpectrumSnapshot snap;
    snap.energies = std::move(energies);
    const Eigen::Index keep = opts.keep < 0 ? vecs.cols() : std::min(opts.keep, vecs.cols());
    snap.eigenvectors = vecs.leftCols(keep);
    fix_gauge(snap, opts.previous);
    return snap;
}

}  // namespace

SpectrumSnapshot diagonalize(const ComplexMatrix& H, const DiagonalizeOptions& opts) {
    check_hermitian(H);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    return finish(es.eigenvalues(), es.eigenvectors(), opts, H.cwiseAbs().maxCoeff());
}

SpectrumSnapshot diagonalize(const RealMatrix& H, const DiagonalizeOptions& opts) {
    check_hermitian(H);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(H);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    return finish(es.eigenvalues(), es.eigenvectors().cast<Complex>(), opts, H.cwiseAbs().maxCoeff());
}

void fix_gauge(SpectrumSnapshot& snap, const SpectrumSnapshot* previous) {
    for (Eigen::Index i = 0; i < snap.kept(); ++i) {
        auto v = snap.eigenvectors.col(i);
        Complex ref(0.0, 0.0);
        if (previous && i < previous->kept() && previous->eigenvectors.rows() == v.rows())
            ref = previous->eigenvectors.col(i).dot(v);
        if (std::abs(ref) < 1e-300) {
            const double big = v.cwiseAbs().maxCoeff();
            Eigen::Index j = 0;
            while (std::abs(v(j)) < big * (1.0 - 1e-12)) ++j;
            ref = v(j);
        }
        if (std::abs(ref) > 0.0) v *= std::conj(ref) / std::abs(ref);
    }
}

double relevant_gap(const Eigen::VectorXd& e, std::span<const int> levels) {
    if (levels.empty()) throw std::invalid_argument("level set is empty");
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] != levels[k - 1] + 1) throw std::invalid_argument("level set must be contiguous");
    const int lo = levels.front(), hi = levels.back();
    if (lo < 0 || hi >= e.size()) throw std::invalid_argument("level index out of range");
    double g = std::numeric_limits<double>::infinity();
    if (lo > 0) g = std::min(g, e(lo) - e(lo - 1));
    for (int k = lo; k < hi; ++k) g = std::min(g, e(k + 1) - e(k));
    if (hi + 1 < e.size()) g = std::min(g, e(hi + 1) - e(hi));
    return g;
}

double relevant_gap(const SpectrumSnapshot& snap, std::span<const int> levels) {
    return relevant_gap(snap.energies, levels);
}

std::vector<double> SpectrumTrace::grid() const {
    std::vector<double> g;
    g.reserve(snapshots.size());
    for (const auto& s : snapshots) g.push_back(s.s);
    return g;
}

std::vector<double> SpectrumTrace::gap(int level) const {
    std::vector<double> g;
    g.reserve(snapshots.size());
    for (const auto& s : snapshots) g.push_back(s.energies(level + 1) - s.energies(level));
    return g;
}

std::vector<double> uniform_grid(std::size_t points) {
    if (points == 0) return {};
    if (points == 1) return {0.0};
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k) g[k] = static_cast<double>(k) / static_cast<double>(points - 1);
    g.back() = 1.0;
    return g;
}

namespace {

void check_grid(const std::vector<double>& grid) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) throw std::invalid_argument("grid points must lie in [0,1]");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw std::invalid_argument("grid must be strictly increasing");
    }
}

std::vector<StateVector> encoding_references() {
    return {basis_state(SpinConfig::all_up()), basis_state(SpinConfig::all_down()),
            basis_state(SpinConfig::from_string("uuuudddd")), basis_state(SpinConfig::from_string("dddduuuu"))};
}

}  // namespace

SpectrumTrace trace_spectrum(const FieldSchedule& schedule, const HamiltonianParams& params,
                             const std::vector<double>& grid, const TraceOptions& opts) {
    check_grid(grid);
    HamiltonianTerms terms = hamiltonian_terms(params);
    InvariantSubspace sector;
    DiagonalizeOptions dopts;
    dopts.keep = opts.keep;
    dopts.tie_references = encoding_references();
    if (opts.symmetric_sector) {
        sector = InvariantSubspace::for_params(params);
        terms = sector.project(terms);
        for (auto& r : dopts.tie_references) r = sector.restrict(r);
    }
    SpectrumTrace trace;
    trace.snapshots.resize(grid.size());
    parallel_for(grid.size(), opts.threads, [&](std::size_t k) {
        const Fields f = fields_at(schedule, grid[k]);
        SpectrumSnapshot snap = diagonalize(terms.assemble(f.A, f.B1, f.B2), dopts);
        snap.s = grid[k];
        if (opts.symmetric_sector) snap.eigenvectors = sector.lift(snap.eigenvectors);
        trace.snapshots[k] = std::move(snap);
    });
    for (std::size_t k = 1; k < trace.size(); ++k) fix_gauge(trace.snapshots[k], &trace.snapshots[k - 1]);
    for (const auto& n : schedule.nodes()) trace.kinks.push_back(n.s);
    return trace;
}

SpectrumTrace trace_family(const std::function<ComplexMatrix(double)>& family, const std::vector<double>& grid,
                           Eigen::Index keep) {
    check_grid(grid);
    SpectrumTrace trace;
    DiagonalizeOptions dopts;
    dopts.keep = keep;
    for (double s : grid) {
        dopts.previous = trace.snapshots.empty() ? nullptr : &trace.snapshots.back();
        SpectrumSnapshot snap = diagonalize(family(s), dopts);
        snap.s = s;
        trace.snapshots.push_back(std::move(snap));
    }
    return trace;
}

std::vector<AvoidedCrossing> detect_avoided_crossings(const std::vector<double>& grid,
                                                      const std::vector<double>& gap, int lower,
                                                      const std::vector<double>& kinks) {
    if (grid.size() != gap.size()) throw std::invalid_argument("grid and gap lengths differ");
    std::vector<AvoidedCrossing> out;
    const std::size_t n = gap.size();
    if (n < 3) return out;
    double scale = 0.0;
    for (double g : gap) scale = std::max(scale, std::abs(g));
    // Differences below this are treated as flat (eigensolver noise).
    const double flat = 1e-9 * std::max(1.0, scale);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(gap[k - 1] - gap[k] > flat)) continue;
        std::size_t m = k + 1;
        while (m < n && std::abs(gap[m] - gap[k]) <= flat) ++m;
        if (m == n || gap[m] < gap[k]) continue;

        AvoidedCrossing c{lower, grid[k], gap[k], k == 1 || k + 2 == n};
        const double x0 = grid[k - 1], x1 = grid[k], x2 = grid[k + 1];
        const double f01 = (gap[k] - gap[k - 1]) / (x1 - x0);
        const double f12 = (gap[k + 1] - gap[k]) / (x2 - x1);
        const double a = (f12 - f01) / (x2 - x0);
        const bool smooth = std::none_of(kinks.begin(), kinks.end(), [&](double z) { return z > x0 && z < x2; });
        if (smooth && a > 0.0) {
            const double xs = 0.5 * (x0 + x1) - f01 / (2.0 * a);
            const double ys = gap[k - 1] + f01 * (xs - x0) + a * (xs - x0) * (xs - x1);
            if (xs >= x0 && xs <= x2 && ys > 0.0 && ys <= gap[k]) {
                c.s_min = xs;
                c.gap_min = ys;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::vector<AvoidedCrossing> detect_avoided_crossings(const SpectrumTrace& trace, int lower) {
    if (trace.size() < 3) throw std::invalid_argument("crossing detection needs at least three snapshots");
    if (lower < 0 || lower + 1 >= trace.snapshots.front().levels())
        throw std::invalid_argument("level pair out of range");
    return detect_avoided_crossings(trace.grid(), trace.gap(lower), lower, trace.kinks);
}

double derivative_norm(const HamiltonianTerms& terms, const Fields& slope) {
    if (slope.A == 0.0 && slope.B1 == 0.0 && slope.B2 == 0.0) return 0.0;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(terms.derivative(slope.A, slope.B1, slope.B2),
                                                 Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

AdiabaticityReport adiabatic_time_bound(const FieldSchedule& schedule, const HamiltonianParams& params,
                                        std::span<const int> levels, const std::vector<double>& grid,
                                        unsigned threads) {
    check_grid(grid);
    if (grid.empty()) throw std::invalid_argument("grid is empty");
    const HamiltonianTerms terms = hamiltonian_terms(params);
    relevant_gap(Eigen::VectorXd::LinSpaced(terms.dim(), 0.0, 1.0), levels);  // validates the level set

    // dH/ds is constant on each segment.
    std::map<std::size_t, double> norms;
    for (double s : grid) {
        const std::size_t seg = schedule.segment(s);
        if (!norms.count(seg)) norms[seg] = derivative_norm(terms, field_slope(schedule, s));
    }

    AdiabaticityReport rep;
    rep.levels.assign(levels.begin(), levels.end());
    rep.points.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        const Fields f = fields_at(schedule, grid[k]);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(terms.assemble(f.A, f.B1, f.B2), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd& e = es.eigenvalues();
        AdiabaticityPoint& p = rep.points[k];
        p.s = grid[k];
        p.dH_norm = norms.at(schedule.segment(grid[k]));
        p.gap = relevant_gap(e, levels);
        const double zero = 1e-12 * std::max(1.0, e.cwiseAbs().maxCoeff());
        if (p.dH_norm == 0.0) {
            p.ratio = 0.0;
        } else if (p.gap <= zero) {
            p.ratio = std::numeric_limits<double>::infinity();
            p.divergent = true;
        } else {
            p.ratio = p.dH_norm / (p.gap * p.gap);
        }
    });
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (const auto& p : rep.points) {
        if (p.ratio > rep.T_bound) {
            rep.T_bound = p.ratio;
            rep.s_at_bound = p.s;
        }
        if (p.gap < rep.min_gap) {
            rep.min_gap = p.gap;
            rep.s_min_gap = p.s;
        }
        rep.divergent = rep.divergent || p.divergent;
    }
    return rep;
}

}  // namespace adiaqnn
