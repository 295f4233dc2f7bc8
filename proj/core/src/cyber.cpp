#include "gridcascade/cyber.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gridcascade/assignment.hpp"
#include "gridcascade/errors.hpp"

namespace gridcascade {

CyberNetwork CyberNetwork::with_identity_coupling(int node_count, std::vector<std::pair<int, int>> edges) {
    CyberNetwork cyber;
    cyber.node_count = node_count;
    cyber.edge_in_service.assign(edges.size(), true);
    cyber.edges = std::move(edges);
    cyber.node_in_service.assign(node_count, true);
    cyber.bus_of_node.resize(node_count);
    cyber.node_of_bus.resize(node_count);
    for (int k = 0; k < node_count; ++k) {
        cyber.bus_of_node[k] = k;
        cyber.node_of_bus[k] = k;
    }
    return cyber;
}

void CyberNetwork::fail_node(int node) {
    node_in_service.at(node) = false;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].first == node || edges[e].second == node) edge_in_service[e] = false;
    }
}

int CyberNetwork::in_service_node_count() const {
    return static_cast<int>(std::ranges::count(node_in_service, true));
}

CyberSource CyberSource::parse(std::string_view text) {
    CyberSource source;
    if (text == "none") return source;
    if (text == "mirror") {
        source.mode = CyberMode::mirror;
        return source;
    }
    constexpr std::string_view kFile = "file:";
    if (text.starts_with(kFile) && text.size() > kFile.size()) {
        source.mode = CyberMode::file;
        source.edge_file = std::string(text.substr(kFile.size()));
        return source;
    }
    throw InputError("cyber mode must be none, mirror or file:<path>, got '" + std::string(text) + "'");
}

CyberNetwork mirror_topology(const PowerNetwork& power) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& br : power.branches) {
        if (br.in_service) edges.emplace_back(br.from_bus, br.to_bus);
    }
    return CyberNetwork::with_identity_coupling(static_cast<int>(power.buses.size()), std::move(edges));
}

CyberNetwork read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open cyber edge list " + path.string());
    std::vector<std::pair<int, int>> edges;
    std::optional<int> declared;
    int max_id = -1;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            std::istringstream header(line.substr(first + 1));
            std::string key;
            int count = 0;
            if (header >> key && key == "nodes") {
                if (!(header >> count) || count < 0) fail("malformed '# nodes N' header");
                declared = count;
            }
            continue;
        }
        std::istringstream fields(line);
        int u = 0, v = 0;
        if (!(fields >> u >> v)) fail("expected 'u v'");
        if (u < 0 || v < 0) fail("node ids must be non-negative");
        if (u == v) fail("self loop");
        max_id = std::max({max_id, u, v});
        edges.emplace_back(u, v);
    }
    const int count = declared.value_or(max_id + 1);
    if (max_id >= count) {
        throw InputError(path.string() + ": node id " + std::to_string(max_id) + " exceeds declared count " +
                         std::to_string(count));
    }
    return CyberNetwork::with_identity_coupling(count, std::move(edges));
}

namespace {

std::vector<Point> ordered_points(const std::vector<LabeledPoint>& points, int count,
                                  const std::function<std::optional<int>(int)>& position,
                                  const std::filesystem::path& path) {
    std::vector<Point> out(count);
    std::vector<bool> seen(count, false);
    for (const auto& p : points) {
        const auto pos = position(p.label);
        if (!pos || *pos < 0 || *pos >= count) {
            throw InputError(path.string() + ": unknown id " + std::to_string(p.label));
        }
        out[*pos] = p.at;
        seen[*pos] = true;
    }
    if (std::ranges::find(seen, false) != seen.end()) {
        throw InputError(path.string() + ": coordinates missing for some ids");
    }
    return out;
}

}  // namespace

std::optional<CyberNetwork> build_cyber_topology(const CyberSource& source, const PowerNetwork& power) {
    const int n = static_cast<int>(power.buses.size());
    CyberNetwork cyber;
    switch (source.mode) {
        case CyberMode::none: return std::nullopt;
        case CyberMode::mirror: cyber = mirror_topology(power); break;
        case CyberMode::file: {
            cyber = read_edge_list(source.edge_file);
            if (cyber.node_count != n) {
                throw InputError("cyber edge list has " + std::to_string(cyber.node_count) +
                                 " nodes but the power network has " + std::to_string(n) + " buses");
            }
            if (source.cyber_coordinates && source.power_coordinates) {
                const auto cyber_xy = ordered_points(
                    read_coordinates(*source.cyber_coordinates), n,
                    [](int label) { return std::optional<int>(label); }, *source.cyber_coordinates);
                const auto power_xy = ordered_points(
                    read_coordinates(*source.power_coordinates), n,
                    [&](int label) { return power.find_bus(label); }, *source.power_coordinates);
                cyber.bus_of_node = assign_coupling(cyber_xy, power_xy);
                for (int node = 0; node < n; ++node) cyber.node_of_bus[cyber.bus_of_node[node]] = node;
            }
            break;
        }
    }
    for (const auto& bus : power.buses) {
        if (!bus.in_service) cyber.fail_node(cyber.node_of_bus[bus.id]);
    }
    return cyber;
}

std::vector<int> assign_coupling(std::span<const Point> cyber, std::span<const Point> power) {
    if (cyber.size() != power.size()) {
        throw InputError("coupling needs equal node counts (" + std::to_string(cyber.size()) + " cyber, " +
                         std::to_string(power.size()) + " power)");
    }
    const int n = static_cast<int>(cyber.size());
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cost[static_cast<std::size_t>(i) * n + j] = std::hypot(cyber[i].x - power[j].x, cyber[i].y - power[j].y);
        }
    }
    return solve_assignment(cost, n).column_of_row;
}

std::vector<int> cyber_components(const CyberNetwork& cyber) {
    const int n = cyber.node_count;
    std::vector<std::vector<int>> adjacent(n);
    for (std::size_t e = 0; e < cyber.edges.size(); ++e) {
        const auto [u, v] = cyber.edges[e];
        if (!cyber.edge_in_service[e] || !cyber.node_in_service[u] || !cyber.node_in_service[v]) continue;
        adjacent[u].push_back(v);
        adjacent[v].push_back(u);
    }
    std::vector<int> label(n, -1);
    int next = 0;
    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (!cyber.node_in_service[start] || label[start] >= 0) continue;
        label[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adjacent[u]) {
                if (label[v] < 0) {
                    label[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

std::vector<int> giant_component_prune(CyberNetwork& cyber) {
    const auto label = cyber_components(cyber);
    std::map<int, int> sizes;
    for (int l : label) {
        if (l >= 0) ++sizes[l];
    }
    if (sizes.size() <= 1) return {};
    // Labels follow the smallest member, so the first maximum wins ties.
    int giant = sizes.begin()->first;
    for (const auto& [l, size] : sizes) {
        if (size > sizes[giant]) giant = l;
    }
    std::vector<int> failed;
    for (int node = 0; node < cyber.node_count; ++node) {
        if (label[node] >= 0 && label[node] != giant) {
            cyber.fail_node(node);
            failed.push_back(node);
        }
    }
    return failed;
}

}  // namespace gridcascade
