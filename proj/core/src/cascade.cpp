#include "gridcascade/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "gridcascade/errors.hpp"

namespace gridcascade {

std::string_view phase_tag(Phase phase) {
    switch (phase) {
        case Phase::trigger: return "T";
        case Phase::a: return "A";
        case Phase::b: return "B";
        case Phase::c: return "C";
        case Phase::d: return "D";
    }
    return "?";
}

Grid::Grid(PowerNetwork power, std::optional<CyberNetwork> cyber, CascadeOptions options)
    : power_(std::move(power)), cyber_(std::move(cyber)), options_(options) {
    n0_ = power_.in_service_bus_count();
    m0_ = power_.in_service_branch_count();
    l0_ = power_.served_load_mw();
    for (const auto& bus : power_.buses) bus_up_at_last_b_.push_back(bus.in_service);
    for (const auto& br : power_.branches) branch_up_at_last_b_.push_back(br.in_service);
    if (cyber_) cyber_edge_up_at_last_c_ = cyber_->edge_in_service;
    refresh_failed_sets();
}

void Grid::trigger(std::span<const int> buses, std::span<const int> branches) {
    for (int b : buses) {
        if (b < 0 || b >= static_cast<int>(power_.buses.size())) {
            throw InputError("attacked bus " + std::to_string(b) + " does not exist");
        }
    }
    for (int e : branches) {
        if (e < 0 || e >= static_cast<int>(power_.branches.size())) {
            throw InputError("attacked branch " + std::to_string(e) + " does not exist");
        }
    }
    for (int b : buses) power_.take_bus_out(b);
    for (int e : branches) power_.take_branch_out(e);
    refresh_failed_sets();
    record(Phase::trigger);
}

void Grid::phase_a() {
    phase_a_tripped_ = false;
    while (true) {
        bool changed = false;
        auto partition = extract_islands(power_);
        changed = !partition.removed.empty();
        for (const auto& island : partition.live) {
            const auto outcome = shed_and_solve(power_, island, options_.solver);
            if (!outcome.solved) {
                changed = true;
                continue;
            }
            if (!remove_overloaded_branches(power_, island, outcome.solution).empty()) changed = true;
        }
        if (!changed) break;
        phase_a_tripped_ = true;
    }

    new_failed_buses_.clear();
    new_failed_branches_.clear();
    for (const auto& bus : power_.buses) {
        if (!bus.in_service && bus_up_at_last_b_[bus.id]) new_failed_buses_.push_back(bus.id);
    }
    for (const auto& br : power_.branches) {
        if (!br.in_service && branch_up_at_last_b_[br.id]) new_failed_branches_.push_back(br.id);
    }
    refresh_failed_sets();
    record(Phase::a);
}

void Grid::phase_b() {
    if (new_failed_buses_.empty()) {
        stopped_ = true;
    } else if (cyber_) {
        for (int bus : new_failed_buses_) {
            const int node = cyber_->node_of_bus[bus];
            if (cyber_->node_in_service[node]) cyber_->fail_node(node);
        }
    } else if (!phase_a_tripped_) {
        stopped_ = true;
    }
    for (const auto& bus : power_.buses) bus_up_at_last_b_[bus.id] = bus.in_service;
    for (const auto& br : power_.branches) branch_up_at_last_b_[br.id] = br.in_service;
    refresh_failed_sets();
    record(Phase::b);
}

void Grid::phase_c() {
    new_failed_cyber_nodes_.clear();
    new_failed_cyber_edges_.clear();
    if (cyber_) {
        new_failed_cyber_nodes_ = giant_component_prune(*cyber_);
        for (std::size_t e = 0; e < cyber_->edges.size(); ++e) {
            if (!cyber_->edge_in_service[e] && cyber_edge_up_at_last_c_[e]) {
                new_failed_cyber_edges_.push_back(static_cast<int>(e));
            }
        }
        cyber_edge_up_at_last_c_ = cyber_->edge_in_service;
    }
    refresh_failed_sets();
    record(Phase::c);
}

void Grid::phase_d() {
    if (cyber_) {
        if (new_failed_cyber_nodes_.empty()) {
            stopped_ = true;
        } else {
            for (int node : new_failed_cyber_nodes_) {
                const int bus = cyber_->bus_of_node[node];
                if (power_.buses[bus].in_service) power_.take_bus_out(bus);
            }
        }
    }
    refresh_failed_sets();
    record(Phase::d);
}

bool Grid::check_blackout() const {
    return 2 * power_.in_service_bus_count() < n0_ || 2 * power_.in_service_branch_count() < m0_ ||
           2.0 * power_.served_load_mw() < l0_;
}

void Grid::refresh_failed_sets() {
    for (const auto& bus : power_.buses) {
        if (!bus.in_service) failed_buses_.insert(bus.id);
    }
    for (const auto& br : power_.branches) {
        if (!br.in_service) failed_branches_.insert(br.id);
    }
    if (cyber_) {
        for (int node = 0; node < cyber_->node_count; ++node) {
            if (!cyber_->node_in_service[node]) failed_cyber_nodes_.insert(node);
        }
        for (std::size_t e = 0; e < cyber_->edges.size(); ++e) {
            if (!cyber_->edge_in_service[e]) failed_cyber_edges_.insert(static_cast<int>(e));
        }
    }
}

void Grid::record(Phase phase) {
    if (!options_.record_snapshots) return;
    PhaseSnapshot snap;
    snap.iteration = iteration_;
    snap.phase = phase;
    snap.bus_island.assign(power_.buses.size(), -1);
    const auto components = connected_components(power_);
    for (std::size_t k = 0; k < components.size(); ++k) {
        IslandSummary summary{static_cast<int>(k), static_cast<int>(components[k].buses.size()), 0.0};
        for (int b : components[k].buses) snap.bus_island[b] = static_cast<int>(k);
        for (int l : components[k].loads) summary.served_load_mw += power_.loads[l].scale * power_.loads[l].p;
        snap.islands.push_back(summary);
    }
    for (const auto& br : power_.branches) snap.branch_in_service.push_back(br.in_service);
    if (cyber_) {
        snap.cyber_component = cyber_components(*cyber_);
        snap.cyber_edge_in_service = cyber_->edge_in_service;
    }
    snap.served_load_mw = power_.served_load_mw();
    log_.push_back(std::move(snap));
}

CascadeResult run_cascade(PowerNetwork power, std::optional<CyberNetwork> cyber,
                          std::span<const int> attacked_buses, std::span<const int> attacked_branches,
                          const CascadeOptions& options) {
    std::vector<bool> initially_up;
    for (const auto& bus : power.buses) initially_up.push_back(bus.in_service);
    Grid grid(std::move(power), std::move(cyber), options);
    grid.trigger(attacked_buses, attacked_branches);

    // Each non-stopping iteration fails at least one power component or cyber
    // node, so this cap is unreachable unless the bookkeeping is broken.
    const int cap = grid.initial_buses() + grid.initial_branches() + 1;
    bool abnormal = false;
    while (true) {
        if (grid.iteration() >= cap) {
            abnormal = true;
            break;
        }
        grid.begin_iteration();
        grid.phase_a();
        grid.phase_b();
        if (grid.stopped()) break;
        grid.phase_c();
        grid.phase_d();
        if (grid.stopped()) break;
    }

    const auto& net = grid.power();
    double served = 0.0, shed = 0.0, lost = 0.0;
    for (const auto& load : net.loads) {
        if (!initially_up[load.bus]) continue;
        if (net.buses[load.bus].in_service) {
            served += load.scale * load.p;
            shed += (1.0 - load.scale) * load.p;
        } else {
            lost += load.p;
        }
    }
    const bool blackout = grid.check_blackout();
    const int iterations = grid.iteration();
    return CascadeResult{blackout, abnormal, iterations, served, shed, lost, std::move(grid)};
}

PowerNetwork prepare_ratings(PowerNetwork network, const RatingOptions& ratings, const SolverOptions& solver) {
    PowerNetwork work = network;
    std::vector<double> flow_mva(network.branches.size(), 0.0);
    bool any_solved = false;
    for (const auto& island : extract_islands(work).live) {
        const auto outcome = shed_and_solve(work, island, solver);
        if (!outcome.solved) continue;
        any_solved = true;
        for (int k : island.branches) {
            const auto& f = outcome.solution.flows[k];
            flow_mva[k] = std::max(std::hypot(f.p_lm, f.q_lm), std::hypot(f.p_ml, f.q_ml)) * network.base_mva;
        }
    }
    if (!any_solved) throw InputError("the intact network has no solvable island");
    return normalize_ratings(std::move(network), flow_mva, ratings);
}

}  // namespace gridcascade
