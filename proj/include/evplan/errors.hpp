#pragma once

#include <stdexcept>
#include <string>

namespace evplan {

/// Malformed or inconsistent configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that cannot be used (bad geometry, empty coverage, ...). Exit code 3.
class InputDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Routing or weather service failure. Exit code 4.
class ServiceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage was requested before the stage it depends on.
class MissingStageError : public std::runtime_error {
public:
    MissingStageError(const std::string& stage, const std::string& needs, bool stale = false)
        : std::runtime_error("stage '" + stage + "' needs the output of stage '" + needs + "'" +
                             (stale ? ", which is out of date for the current configuration" : "") +
                             "; run `evplan " + needs + "` first (or `evplan run`)"),
          needed_(needs) {}

    const std::string& needed_stage() const { return needed_; }

private:
    std::string needed_;
};

}  // namespace evplan
