#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sklab/simulation.hpp"

namespace sklab::cfg {

/// Flat sectioned key=value text ([mapping], [source], [channel], [decoder],
/// [run]); '#' starts a comment. Unknown sections or keys are rejected with a
/// message naming the offending field.
sim::ExperimentConfig parse_experiment_config(const std::string& text);
sim::ExperimentConfig load_experiment_config(const std::string& path);

/// FNV-1a digest over the canonicalized (sorted) key/value set, so the digest
/// is stable under reordering and comment or whitespace changes.
std::uint64_t config_digest(const std::string& text);

struct RunManifest {
    std::uint64_t config_digest = 0;
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string started_at;  // ISO 8601 UTC
    std::string finished_at;
    std::vector<std::string> outputs;

    std::string to_json() const;
};

std::string iso8601_utc_now();

}  // namespace sklab::cfg
