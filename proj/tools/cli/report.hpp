#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcascade/cascade.hpp"

namespace gridcascade::cli {

/// `<iteration:3 digits><phase tag>.json`, e.g. 000T.json or 002C.json.
std::string snapshot_file_name(const PhaseSnapshot& snapshot);

/// Self-describing document for one phase. Failed buses and cyber nodes carry
/// island -1; `net` supplies bus numbers and branch endpoints, `cyber` the
/// edge list and coupling.
nlohmann::json snapshot_json(const PhaseSnapshot& snapshot, const PowerNetwork& net,
                             const std::optional<CyberNetwork>& cyber);

struct RunDescription {
    std::string case_path;
    std::string cyber_mode;
    std::vector<int> attacked_buses;     // bus ids
    std::vector<int> attacked_branches;  // branch ids
};

nlohmann::json summary_json(const CascadeResult& result, const RunDescription& run);

/// Writes every logged phase plus summary.json into `dir`, creating it.
void write_run_files(const std::filesystem::path& dir, const CascadeResult& result, const RunDescription& run);

}  // namespace gridcascade::cli
