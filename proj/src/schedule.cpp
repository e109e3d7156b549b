#include "adiaqnn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adiaqnn {

FieldSchedule::FieldSchedule(std::vector<ScheduleNode> nodes, double ratio1, double ratio2)
    : nodes_(std::move(nodes)), ratio1_(ratio1), ratio2_(ratio2) {
    if (nodes_.size() < 2) throw std::invalid_argument("schedule needs at least two nodes");
    if (nodes_.front().s != 0.0 || nodes_.back().s != 1.0)
        throw std::invalid_argument("schedule nodes must start at s=0 and end at s=1");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const auto& n = nodes_[k];
        if (!std::isfinite(n.s) || !std::isfinite(n.A) || !std::isfinite(n.B))
            throw std::invalid_argument("schedule node values must be finite");
        if (k > 0 && !(n.s > nodes_[k - 1].s))
            throw std::invalid_argument("schedule node s values must be strictly increasing");
    }
    if (!std::isfinite(ratio1_) || !std::isfinite(ratio2_))
        throw std::invalid_argument("field ratios must be finite");
}

FieldSchedule FieldSchedule::constant(double A, double B, double ratio1, double ratio2) {
    return FieldSchedule({{0.0, A, B}, {1.0, A, B}}, ratio1, ratio2);
}

std::size_t FieldSchedule::segment(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("scaled time s must lie in [0,1]");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s,
                               [](double v, const ScheduleNode& n) { return v < n.s; });
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, nodes_.size() - 2);
}

double FieldSchedule::max_A() const {
    double m = nodes_.front().A;
    for (const auto& n : nodes_) m = std::max(m, n.A);
    return m;
}

double FieldSchedule::max_B() const {
    double m = nodes_.front().B;
    for (const auto& n : nodes_) m = std::max(m, n.B);
    return m;
}

Fields fields_at(const FieldSchedule& schedule, double s) {
    const std::size_t k = schedule.segment(s);
    const auto& a = schedule.nodes()[k];
    const auto& b = schedule.nodes()[k + 1];
    const double w = (s - a.s) / (b.s - a.s);
    const double A = a.A + w * (b.A - a.A);
    const double B = a.B + w * (b.B - a.B);
    return {A, schedule.ratio1() * B, schedule.ratio2() * B};
}

Fields field_slope(const FieldSchedule& schedule, double s) {
    const std::size_t k = schedule.segment(s);
    const auto& a = schedule.nodes()[k];
    const auto& b = schedule.nodes()[k + 1];
    const double h = b.s - a.s;
    const double dB = (b.B - a.B) / h;
    return {(b.A - a.A) / h, schedule.ratio1() * dB, schedule.ratio2() * dB};
}

}  // namespace adiaqnn
