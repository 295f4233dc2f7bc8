#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gridcascade/network.hpp"

namespace gridcascade {

/// Communication layer coupled one-to-one to the power buses. Edges fail only
/// through their endpoints.
struct CyberNetwork {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> node_in_service;
    std::vector<bool> edge_in_service;
    std::vector<int> bus_of_node;  // cyber node -> power bus id
    std::vector<int> node_of_bus;  // power bus id -> cyber node

    /// Builds a layer with all nodes and edges in service and identity coupling.
    static CyberNetwork with_identity_coupling(int node_count, std::vector<std::pair<int, int>> edges);

    void fail_node(int node);
    [[nodiscard]] int in_service_node_count() const;
};

enum class CyberMode { none, mirror, file };

struct CyberSource {
    CyberMode mode = CyberMode::none;
    std::filesystem::path edge_file;
    std::optional<std::filesystem::path> cyber_coordinates;  // `node x y`
    std::optional<std::filesystem::path> power_coordinates;  // `bus_number x y`

    /// Parses "none", "mirror" or "file:<path>". Throws InputError otherwise.
    static CyberSource parse(std::string_view text);
};

/// Cyber graph whose edges copy the in-service power branches.
CyberNetwork mirror_topology(const PowerNetwork& power);

/// Reads an edge list of `u v` lines with 0-based node ids. The node count is
/// taken from a `# nodes N` header when present, else max id + 1.
CyberNetwork read_edge_list(const std::filesystem::path& path);

/// Realises the requested cyber layer, or nullopt for CyberMode::none. In file
/// mode the coupling is computed by `assign_coupling` when both coordinate
/// files are given and is the identity otherwise. Cyber nodes coupled to buses
/// that start out of service start failed.
std::optional<CyberNetwork> build_cyber_topology(const CyberSource& source, const PowerNetwork& power);

/// Bijection cyber node -> power position minimising the summed Euclidean
/// distance between coupled pairs. Throws InputError on a count mismatch.
std::vector<int> assign_coupling(std::span<const Point> cyber, std::span<const Point> power);

/// Component label per node over in-service nodes and edges (-1 for failed
/// nodes), labels ordered by smallest member.
std::vector<int> cyber_components(const CyberNetwork& cyber);

/// Fails every in-service node outside the largest component (ties: the
/// component holding the smallest node id survives). Returns the newly failed
/// nodes in ascending order.
std::vector<int> giant_component_prune(CyberNetwork& cyber);

}  // namespace gridcascade
