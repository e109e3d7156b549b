#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adiaqnn {

struct ScheduleNode {
    double s = 0.0;
    double A = 0.0;
    double B = 0.0;
};

struct Fields {
    double A = 0.0;
    double B1 = 0.0;
    double B2 = 0.0;
};

// Piecewise-linear A(s), B(s) on s in [0,1]; B1 = ratio1*B, B2 = ratio2*B.
class FieldSchedule {
public:
    FieldSchedule() = default;
    // Throws std::invalid_argument unless s is strictly increasing from 0 to 1
    // and all values are finite.
    FieldSchedule(std::vector<ScheduleNode> nodes, double ratio1 = 1e-5, double ratio2 = 1e-6);

    static FieldSchedule constant(double A, double B, double ratio1 = 1e-5, double ratio2 = 1e-6);

    const std::vector<ScheduleNode>& nodes() const { return nodes_; }
    double ratio1() const { return ratio1_; }
    double ratio2() const { return ratio2_; }

    // Index of the segment used for s: the one starting at s, except at s = 1.
    std::size_t segment(double s) const;
    double max_A() const;
    double max_B() const;

private:
    std::vector<ScheduleNode> nodes_;
    double ratio1_ = 1e-5;
    double ratio2_ = 1e-6;
};

Fields fields_at(const FieldSchedule& schedule, double s);
// Right slope at interior nodes, left slope at s = 1.
Fields field_slope(const FieldSchedule& schedule, double s);

struct SchedulePreset {
    std::string name;
    FieldSchedule schedule;
    // Readout fractions where the gate peaks were found, if known.
    std::optional<double> s_H;
    std::optional<double> s_Bell;
    // Calibration record (peak fidelities, gap minima, T bound).
    std::map<std::string, double> metrics;
};

// The calibrated default for the fountain trap, compiled in.
SchedulePreset fountain_default_preset();
SchedulePreset preset_by_name(const std::string& name);

}  // namespace adiaqnn
