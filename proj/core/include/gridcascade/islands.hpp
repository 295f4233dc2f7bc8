#pragma once

#include <vector>

#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"

namespace gridcascade {

/// One connected component of the in-service power network. All index lists
/// are ascending.
struct Island {
    std::vector<int> buses;
    std::vector<int> branches;
    std::vector<int> generators;
    std::vector<int> loads;
    int slack = -1;
};

struct IslandPartition {
    std::vector<Island> live;
    std::vector<Island> removed;
};

/// Connected components over in-service buses and branches, ordered by their
/// smallest bus id. Does not modify the network.
std::vector<Island> connected_components(const PowerNetwork& network);

/// Splits the network into islands. Components lacking in-service generation or
/// positive active demand are taken out of service in full. Every surviving
/// island gets exactly one slack bus, and islands whose generator setpoints
/// exceed their effective demand are curtailed.
IslandPartition extract_islands(PowerNetwork& network);

/// Makes the bus with the largest in-service generating capacity the island's
/// slack (ties go to the lowest bus id) and returns it. An island that already
/// has a slack bus keeps it. Throws std::invalid_argument if the island has no
/// in-service generator.
int assign_slack(PowerNetwork& network, const Island& island);

/// Scales every in-service generator setpoint of the island by
/// sum(effective load) / sum(p_set) when generation exceeds demand.
/// Returns the applied factor (1 when nothing changed).
double curtail_generation(PowerNetwork& network, const Island& island);

/// Copy of `network` in which everything outside `island` is out of service.
PowerNetwork isolate(const PowerNetwork& network, const Island& island);

void take_island_out(PowerNetwork& network, const Island& island);

/// Load-shedding ladder, s = 1.00, 0.95, ..., 0.05.
inline constexpr int kShedSteps = 20;
[[nodiscard]] constexpr double shed_scale(int step) { return static_cast<double>(kShedSteps - step) / kShedSteps; }

struct ShedOutcome {
    bool solved = false;
    double scale = 0.0;
    PowerFlowSolution solution;           // indexed like the owning network
    std::vector<double> attempted_scales;  // rungs that passed the capacity screen
};

/// Walks the shedding ladder from full load downwards, skipping rungs whose
/// demand exceeds the island's generating capacity, and stops at the first rung
/// whose power flow converges. On success the island's loads keep that scale;
/// if no rung converges the island is taken out of service.
ShedOutcome shed_and_solve(PowerNetwork& network, const Island& island,
                           const SolverOptions& options = {});

/// Takes every in-service island branch loaded strictly above 100% out of
/// service, all at once. Returns the removed branch ids in ascending order.
std::vector<int> remove_overloaded_branches(PowerNetwork& network, const Island& island,
                                            const PowerFlowSolution& solution);

}  // namespace gridcascade
