#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace rflab::cli {

/// Invalid or inconsistent configuration; raised before any artifact is written.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A stage failed after validation. Artifacts of earlier stages are kept.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitConfig = 2;

/// Commands: simulate, collapse, dilate, gh, glue, compare, classify, pipeline.
/// `recipe` names the pipeline recipe (only "type2b").
/// Relative paths inside the config resolve against `base_dir`.
void run(const std::string& command, const std::string& recipe, const nlohmann::json& config,
         const std::filesystem::path& out, std::uint64_t seed,
         const std::filesystem::path& base_dir = {});

/// Reads the config file, runs, and maps failures to exit codes with a message
/// on stderr.
int run_main(const std::string& command, const std::string& recipe,
             const std::filesystem::path& config_path, const std::filesystem::path& out,
             std::uint64_t seed);

}  // namespace rflab::cli
