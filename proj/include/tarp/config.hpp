#pragma once

// Flat key=value experiment configuration. Lines starting with '#' are comments.
// Unknown keys are errors; every resolved value is echoed in run summaries.

#include "tarp/ensemble.hpp"
#include "tarp/simgen.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace tarp {

using Json = nlohmann::ordered_json;

struct ExperimentSpec {
    std::optional<SchemeSpec> scheme;
    std::optional<std::filesystem::path> trainPath;
    std::optional<std::filesystem::path> testPath;
    Index nDatasets = 100;
    TarpConfig tarp;
    std::filesystem::path out = "tarp_out";

    /// Exactly one of a scheme or data paths.
    void validate() const;
};

/// Ordered key -> value map; duplicate keys are errors.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Applies one key. Scheme keys create a default ar1 scheme on first use.
void apply_key(ExperimentSpec& spec, const std::string& key, const std::string& value);
void apply_config_file(ExperimentSpec& spec, const std::filesystem::path& path);

Json to_json(const TarpConfig& cfg);
Json to_json(const SchemeSpec& spec);
Json to_json(const ExperimentSpec& spec);

}  // namespace tarp
