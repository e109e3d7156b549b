#include "adiaqnn/schedule.hpp"

#include <stdexcept>

namespace adiaqnn {

// Produced by `adiaqnn calibrate` with data/calibration/fountain-default.json;
// the same preset is stored in data/presets/fountain-default.json.
SchedulePreset fountain_default_preset() {
    SchedulePreset p;
    p.name = "fountain-default";
    p.schedule = FieldSchedule({{0.0, 0.0, 1e5}, {0.4, 24.0, 1e5}, {0.5, 24.0, 0.0}, {1.0, 30.0, 0.0}}, 1e-5, 1e-6);
    // h gate at T = 100 T_bound, levels {0, 1}; report in data/calibration.
    p.s_H = 0.518;
    p.metrics = {{"T", 16192503.351466626},
                 {"T_bound", 161925.03351466625},
                 {"min_gap", 0.024348859221277053},
                 {"objective", 0.9175733314698976},
                 {"peak_h", 0.9175733314698976}};
    return p;
}

SchedulePreset preset_by_name(const std::string& name) {
    if (name == "fountain-default") return fountain_default_preset();
    throw std::invalid_argument("unknown schedule preset '" + name + "'");
}

}  // namespace adiaqnn
