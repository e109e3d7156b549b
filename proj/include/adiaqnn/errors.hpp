#pragma once

#include <stdexcept>
#include <string>

namespace adiaqnn {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    numerical_failure = 3,
    calibration_failed = 4,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept = 0;
};

enum class ConfigErrorKind {
    file_not_found,
    malformed_json,
    missing_field,
    invalid_value,
    conflicting_fields,
    unknown_field,
};

const char* to_string(ConfigErrorKind kind) noexcept;

class ConfigError : public Error {
public:
    ConfigError(ConfigErrorKind kind, std::string field, const std::string& what)
        : Error(what), kind_(kind), field_(std::move(field)) {}
    ExitCode exit_code() const noexcept override { return ExitCode::config_error; }
    ConfigErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ConfigErrorKind kind_;
    std::string field_;
};

// Non-convergence, non-finite values, failed encoding checks.
class NumericalError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::numerical_failure; }
};

class CalibrationFailed : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::calibration_failed; }
};

}  // namespace adiaqnn
