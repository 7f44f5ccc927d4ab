#pragma once

#include "lindrec/experiments.hpp"
#include "lindrec/increments.hpp"
#include "lindrec/lindley.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace lindrec
{
    // Config grammar (one entry per line, '#' starts a comment):
    //
    //   key = value
    //   law = finite{ -1:3/10, 0:2/5, 1:3/10 }
    //   law = stable{ alpha=1.5, beta=-1, scale=1, log_power=0 }
    //   law = joint{ (-1,1):1/4, (-1,2):1/4, (1,-1):1/4, (2,-1):1/4 }
    //
    // A law block may span several lines up to its closing brace. Keys are
    // listed in `config_keys()`; unknown or repeated keys are errors.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(int line, const std::string& message);

        int line() const noexcept { return line_; }

    private:
        int line_;
    };

    enum class ExperimentKind
    {
        Simulate,
        Ladder,
        MaxDist,
        Subordinate,
        Renewal,
        Backward,
        Classify,
        Essential,
    };

    const char* to_string(ExperimentKind k) noexcept;
    std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

    enum class OutputFormat
    {
        Csv,
        Json,
    };

    using LawSpec = std::variant<IncrementLaw, VectorLaw>;

    // Throws std::invalid_argument on malformed text.
    LawSpec parse_law(std::string_view text);

    struct ExperimentConfig
    {
        ExperimentKind kind = ExperimentKind::Classify;
        std::optional<std::uint64_t> seed;
        std::int64_t replicas = 200;
        std::int64_t horizon = 1000;
        unsigned threads = 0;
        OutputFormat format = OutputFormat::Csv;
        std::string out = "out";

        std::optional<LawSpec> law;
        std::optional<IncrementLaw> law1;
        std::optional<IncrementLaw> law2;
        std::optional<IncrementLaw> law_s;
        std::optional<IncrementLaw> law_z;
        std::array<CoordinateRole, 2> roles = {CoordinateRole::Lindley, CoordinateRole::Lindley};

        LadderKind ladder = LadderKind::StrictAscending;
        bool rational = false;
        std::int64_t x_min = 1;
        std::int64_t x_max = 100;
        bool fold = true;
        std::int64_t oracle_n = 0;      // 0: no oracle column
        std::int64_t start_level = 64;
        std::int64_t bound = 64;
        std::int64_t forward_n = 0;     // 0: no forward comparison
        std::int64_t backward_runs = 1000;
        std::int64_t backward_steps = 10000;
        std::int64_t green_K = 10000;
        double recurrence_growth = 1.5;
        double transience_growth = 1.05;

        // Canonical (key, value) pairs in key order; the hash covers these.
        std::vector<std::pair<std::string, std::string>> canonical() const;
        std::uint64_t hash() const;
    };

    const std::vector<std::string>& config_keys();

    // Parses config text. Missing keys keep their defaults.
    ExperimentConfig parse_config(std::string_view text);
    ExperimentConfig load_config(const std::string& path);

    // Applies a single `key = value` assignment (CLI overrides use line 0).
    void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line);

    // 64-bit FNV-1a.
    std::uint64_t fnv1a64(std::string_view bytes) noexcept;
}
