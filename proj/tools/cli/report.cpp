#include "cli/report.hpp"

#include <cstdio>
#include <fstream>

#include "gridcascade/errors.hpp"

namespace gridcascade::cli {
namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

nlohmann::json bus_numbers(const PowerNetwork& net, const std::vector<int>& ids) {
    auto out = nlohmann::json::array();
    for (int id : ids) out.push_back(net.buses[id].number);
    return out;
}

}  // namespace

std::string snapshot_file_name(const PhaseSnapshot& snapshot) {
    char name[32];
    std::snprintf(name, sizeof name, "%03d%s.json", snapshot.iteration,
                  std::string(phase_tag(snapshot.phase)).c_str());
    return name;
}

nlohmann::json snapshot_json(const PhaseSnapshot& snapshot, const PowerNetwork& net,
                             const std::optional<CyberNetwork>& cyber) {
    nlohmann::json doc;
    doc["iteration"] = snapshot.iteration;
    doc["phase"] = std::string(phase_tag(snapshot.phase));
    doc["served_load_mw"] = snapshot.served_load_mw;

    auto buses = nlohmann::json::array();
    for (const auto& bus : net.buses) {
        buses.push_back({{"id", bus.id}, {"number", bus.number}, {"island", snapshot.bus_island[bus.id]}});
    }
    auto branches = nlohmann::json::array();
    for (const auto& br : net.branches) {
        branches.push_back({{"id", br.id},
                            {"from", net.buses[br.from_bus].number},
                            {"to", net.buses[br.to_bus].number},
                            {"in_service", static_cast<bool>(snapshot.branch_in_service[br.id])}});
    }
    auto islands = nlohmann::json::array();
    for (const auto& island : snapshot.islands) {
        islands.push_back(
            {{"id", island.id}, {"buses", island.bus_count}, {"served_load_mw", island.served_load_mw}});
    }
    doc["power"] = {{"buses", buses}, {"branches", branches}, {"islands", islands}};

    if (!cyber || snapshot.cyber_component.empty()) {
        doc["cyber"] = nullptr;
        return doc;
    }
    auto nodes = nlohmann::json::array();
    for (int node = 0; node < cyber->node_count; ++node) {
        nodes.push_back({{"id", node},
                         {"bus", net.buses[cyber->bus_of_node[node]].number},
                         {"component", snapshot.cyber_component[node]}});
    }
    auto edges = nlohmann::json::array();
    for (std::size_t e = 0; e < cyber->edges.size(); ++e) {
        edges.push_back({{"id", e},
                         {"u", cyber->edges[e].first},
                         {"v", cyber->edges[e].second},
                         {"in_service", static_cast<bool>(snapshot.cyber_edge_in_service[e])}});
    }
    doc["cyber"] = {{"nodes", nodes}, {"edges", edges}};
    return doc;
}

nlohmann::json summary_json(const CascadeResult& result, const RunDescription& run) {
    const auto& grid = result.grid;
    const auto& net = grid.power();
    nlohmann::json doc;
    doc["case"] = run.case_path;
    doc["cyber"] = run.cyber_mode;
    doc["attacked_buses"] = bus_numbers(net, run.attacked_buses);
    doc["attacked_branches"] = run.attacked_branches;
    doc["blackout"] = result.blackout;
    doc["abnormal"] = result.abnormal;
    doc["iterations"] = result.iterations;
    doc["initial"] = {{"buses", grid.initial_buses()},
                      {"branches", grid.initial_branches()},
                      {"load_mw", grid.initial_load_mw()}};
    doc["final"] = {{"buses", net.in_service_bus_count()}, {"branches", net.in_service_branch_count()}};
    doc["served_load_mw"] = result.served_load_mw;
    doc["shed_load_mw"] = result.shed_load_mw;
    doc["lost_load_mw"] = result.lost_load_mw;
    doc["failed_buses"] = bus_numbers(net, {grid.failed_buses().begin(), grid.failed_buses().end()});
    doc["failed_branches"] = std::vector<int>(grid.failed_branches().begin(), grid.failed_branches().end());
    if (grid.cyber()) {
        doc["failed_cyber_nodes"] =
            std::vector<int>(grid.failed_cyber_nodes().begin(), grid.failed_cyber_nodes().end());
    }
    return doc;
}

void write_run_files(const std::filesystem::path& dir, const CascadeResult& result, const RunDescription& run) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    const auto& grid = result.grid;
    for (const auto& snap : grid.phase_log()) {
        write_json(dir / snapshot_file_name(snap), snapshot_json(snap, grid.power(), grid.cyber()));
    }
    write_json(dir / "summary.json", summary_json(result, run));
}

}  // namespace gridcascade::cli
