#pragma once

#include "adiaqnn/calibrate.hpp"
#include "adiaqnn/evolution.hpp"
#include "adiaqnn/schedule.hpp"
#include "adiaqnn/spin_core.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adiaqnn {

struct CalibrationSettings {
    SearchSpace space;
    std::size_t budget = 1;
    std::vector<std::string> gates;
    std::string name = "calibrated";
};

struct ExperimentConfig {
    std::filesystem::path source;        // empty when parsed from memory

    std::string trap = "fountain";       // preset name, or "explicit"
    HamiltonianParams params;            // couplings only, fields zero
    SchedulePreset schedule;
    std::string schedule_source = "fountain-default";
    std::string gate = "h";

    std::vector<double> epsilons{0.0};
    std::vector<double> r3_values;       // distributed-noise sweep, fountain
    std::vector<double> r2_values;       // distributed-noise sweep, harmonic

    std::optional<double> T;
    std::optional<double> T_multiplier;  // exactly one of T / T_multiplier is set

    IntegratorConfig integrator;
    std::size_t samples = 1001;          // sample points on [0,1]
    std::size_t spectrum_grid = 1001;
    int spectrum_levels = 5;
    std::vector<int> bound_levels;       // defaults per gate
    std::size_t bound_grid = 1001;
    std::size_t mc_samples = 0;          // Monte-Carlo cross-check at each peak
    std::optional<CalibrationSettings> calibration;

    std::optional<std::filesystem::path> output_dir;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    // Resolved configuration, suitable for echoing into a manifest and for
    // feeding back into parse_config_json.
    nlohmann::json to_json() const;
};

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

// Default sweep grids.
std::vector<double> default_r3_sweep(double r1);   // r1 * {0, 0.1, ..., 0.9}
std::vector<double> default_epsilon_sweep();       // {0, 0.05, ..., 0.3}
std::vector<double> default_r2_sweep();            // {0, 0.1, ..., 0.5}

nlohmann::json preset_to_json(const SchedulePreset& p);
SchedulePreset preset_from_json(const nlohmann::json& j);
SchedulePreset load_preset(const std::filesystem::path& path);

}  // namespace adiaqnn
