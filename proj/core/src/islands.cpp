#include "gridcascade/islands.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace gridcascade {
namespace {

double effective_load_mw(const PowerNetwork& net, const Island& island) {
    double total = 0.0;
    for (int k : island.loads) total += net.loads[k].scale * net.loads[k].p;
    return total;
}

double nominal_load_mw(const PowerNetwork& net, const Island& island) {
    double total = 0.0;
    for (int k : island.loads) total += net.loads[k].p;
    return total;
}

}  // namespace

std::vector<Island> connected_components(const PowerNetwork& network) {
    const auto n = network.buses.size();
    std::vector<std::vector<int>> adjacent(n);
    for (const auto& br : network.branches) {
        if (!br.in_service || !network.buses[br.from_bus].in_service ||
            !network.buses[br.to_bus].in_service) {
            continue;
        }
        adjacent[br.from_bus].push_back(br.to_bus);
        adjacent[br.to_bus].push_back(br.from_bus);
    }

    std::vector<int> component(n, -1);
    std::vector<Island> islands;
    for (const auto& bus : network.buses) {
        if (!bus.in_service || component[bus.id] >= 0) continue;
        const int label = static_cast<int>(islands.size());
        Island island;
        std::queue<int> frontier;
        frontier.push(bus.id);
        component[bus.id] = label;
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            island.buses.push_back(u);
            for (int v : adjacent[u]) {
                if (component[v] < 0) {
                    component[v] = label;
                    frontier.push(v);
                }
            }
        }
        std::ranges::sort(island.buses);
        islands.push_back(std::move(island));
    }

    for (const auto& br : network.branches) {
        if (br.in_service && component[br.from_bus] >= 0 && component[br.from_bus] == component[br.to_bus]) {
            islands[component[br.from_bus]].branches.push_back(br.id);
        }
    }
    for (std::size_t k = 0; k < network.generators.size(); ++k) {
        const auto& gen = network.generators[k];
        if (gen.in_service && component[gen.bus] >= 0) {
            islands[component[gen.bus]].generators.push_back(static_cast<int>(k));
        }
    }
    for (std::size_t k = 0; k < network.loads.size(); ++k) {
        const int c = component[network.loads[k].bus];
        if (c >= 0) islands[c].loads.push_back(static_cast<int>(k));
    }
    for (auto& island : islands) {
        for (int b : island.buses) {
            if (network.buses[b].kind == BusKind::slack) {
                island.slack = b;
                break;
            }
        }
    }
    return islands;
}

int assign_slack(PowerNetwork& network, const Island& island) {
    int slack = -1;
    for (int b : island.buses) {
        if (network.buses[b].kind != BusKind::slack) continue;
        if (slack < 0) {
            slack = b;
        } else {
            network.buses[b].kind = BusKind::pv;  // one reference per island
        }
    }
    if (slack >= 0) return slack;

    if (island.generators.empty()) throw std::invalid_argument("assign_slack: island has no generator");
    std::vector<double> capacity(network.buses.size(), 0.0);
    for (int k : island.generators) capacity[network.generators[k].bus] += network.generators[k].p_max;
    int best = -1;
    for (int k : island.generators) {
        const int b = network.generators[k].bus;
        if (best < 0 || capacity[b] > capacity[best] || (capacity[b] == capacity[best] && b < best)) best = b;
    }
    network.buses[best].kind = BusKind::slack;
    return best;
}

double curtail_generation(PowerNetwork& network, const Island& island) {
    double generation = 0.0;
    for (int k : island.generators) generation += network.generators[k].p_set;
    const double demand = effective_load_mw(network, island);
    if (!(generation > demand) || generation <= 0.0) return 1.0;
    const double factor = demand / generation;
    for (int k : island.generators) network.generators[k].p_set *= factor;
    return factor;
}

IslandPartition extract_islands(PowerNetwork& network) {
    IslandPartition out;
    for (auto& island : connected_components(network)) {
        if (island.generators.empty() || !(nominal_load_mw(network, island) > 0.0)) {
            take_island_out(network, island);
            out.removed.push_back(std::move(island));
            continue;
        }
        island.slack = assign_slack(network, island);
        curtail_generation(network, island);
        out.live.push_back(std::move(island));
    }
    return out;
}

PowerNetwork isolate(const PowerNetwork& network, const Island& island) {
    PowerNetwork copy = network;
    std::vector<bool> inside(network.buses.size(), false);
    for (int b : island.buses) inside[b] = true;
    for (auto& bus : copy.buses) {
        if (!inside[bus.id]) bus.in_service = false;
    }
    for (auto& br : copy.branches) {
        if (!inside[br.from_bus] || !inside[br.to_bus]) br.in_service = false;
    }
    for (auto& gen : copy.generators) {
        if (!inside[gen.bus]) gen.in_service = false;
    }
    return copy;
}

void take_island_out(PowerNetwork& network, const Island& island) {
    for (int b : island.buses) network.take_bus_out(b);
}

ShedOutcome shed_and_solve(PowerNetwork& network, const Island& island, const SolverOptions& options) {
    ShedOutcome outcome;
    double capacity = 0.0;
    for (int k : island.generators) capacity += network.generators[k].p_max;
    const double demand = nominal_load_mw(network, island);

    PowerNetwork local = isolate(network, island);
    for (int step = 0; step < kShedSteps; ++step) {
        const double s = shed_scale(step);
        if (s * demand > capacity * (1.0 + 1e-12)) continue;
        outcome.attempted_scales.push_back(s);
        for (int k : island.loads) local.loads[k].scale = s;
        auto solution = solve(local, options);
        if (solution.converged) {
            for (int k : island.loads) network.loads[k].scale = s;
            outcome.solved = true;
            outcome.scale = s;
            outcome.solution = std::move(solution);
            return outcome;
        }
    }
    take_island_out(network, island);
    return outcome;
}

std::vector<int> remove_overloaded_branches(PowerNetwork& network, const Island& island,
                                            const PowerFlowSolution& solution) {
    std::vector<int> removed;
    for (int k : island.branches) {
        auto& br = network.branches[k];
        if (!br.in_service) continue;
        if (branch_loading_percent(solution.flows[k], br.rating, network.base_mva) > 100.0) {
            removed.push_back(k);
        }
    }
    for (int k : removed) network.take_branch_out(k);
    return removed;
}

}  // namespace gridcascade
