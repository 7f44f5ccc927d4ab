#pragma once

#include "lindrec/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lindrec
{
    inline constexpr const char* kVersion = "0.1.0";

    enum class RunStatus
    {
        Ok,
        Inconclusive, // verdict OutsideTheory or evidence inconclusive
    };

    struct OutputFile
    {
        std::string name;
        std::uint64_t bytes = 0;
        std::uint64_t fnv1a = 0;
    };

    struct RunResult
    {
        RunStatus status = RunStatus::Ok;
        std::string summary; // one line for the console
        std::vector<OutputFile> files;
    };

    // Runs the configured experiment and writes `<experiment>.csv|json` and
    // `manifest.json` under cfg.out. Each file is written as `<name>.partial`
    // and renamed when complete. Throws ConfigError if the seed is missing
    // or a required law is absent or of the wrong kind.
    RunResult run_experiment(const ExperimentConfig& cfg);

    // The experiment output as bytes, without touching the filesystem.
    std::string render_experiment(const ExperimentConfig& cfg, RunResult& result);

    // Writes bytes to path via path.partial and an atomic rename.
    void write_atomic(const std::string& path, const std::string& bytes);
}
