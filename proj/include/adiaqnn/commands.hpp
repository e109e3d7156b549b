#pragma once

#include "adiaqnn/config.hpp"
#include "adiaqnn/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adiaqnn {

inline constexpr const char* kVersion = "0.1.0";

struct CommandResult {
    std::filesystem::path out_dir;
    std::vector<std::string> files;   // written outputs, manifest excluded
    nlohmann::json summary;
    ExitCode code = ExitCode::ok;
};

// --out, then the config's output_dir, then $ADIAQNN_OUT, then ./adiaqnn-out.
std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& cli_out,
                                         const ExperimentConfig& cfg);

// Each command writes its files plus manifest.json into out_dir (created if
// needed). Errors propagate as adiaqnn::Error subclasses, except that
// cmd_calibrate reports a failed calibration through CommandResult::code
// after writing the best attempt.
CommandResult cmd_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_fidelity(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_adiabaticity(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_calibrate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Entry point shared by the executable; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace adiaqnn
