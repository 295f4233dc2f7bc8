#pragma once

#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "gridcascade/cyber.hpp"
#include "gridcascade/islands.hpp"
#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"

namespace gridcascade {

enum class Phase { trigger, a, b, c, d };

/// "T", "A", "B", "C" or "D".
std::string_view phase_tag(Phase phase);

struct IslandSummary {
    int id = 0;
    int bus_count = 0;
    double served_load_mw = 0.0;
};

/// State of both layers after one phase. Island ids are connected components
/// of the in-service power network ordered by smallest bus id; -1 marks failed
/// buses (and failed cyber nodes).
struct PhaseSnapshot {
    int iteration = 0;
    Phase phase = Phase::trigger;
    std::vector<int> bus_island;
    std::vector<bool> branch_in_service;
    std::vector<int> cyber_component;  // empty without a cyber layer
    std::vector<bool> cyber_edge_in_service;
    std::vector<IslandSummary> islands;
    double served_load_mw = 0.0;
};

struct CascadeOptions {
    SolverOptions solver;
    bool record_snapshots = true;
};

/// Cascade state for one run: working copies of both layers, cumulative failed
/// sets, the deltas that drive cross-layer propagation, and the phase log.
class Grid {
  public:
    Grid(PowerNetwork power, std::optional<CyberNetwork> cyber, CascadeOptions options = {});

    /// Takes the attacked buses (with incident branches) and branches out of
    /// service. Throws InputError for ids that do not exist.
    void trigger(std::span<const int> buses, std::span<const int> branches);

    /// Power-layer fixpoint: islanding, shedding ladder and overload tripping
    /// repeated until an inner pass changes nothing.
    void phase_a();
    /// Failed power buses fail their coupled cyber nodes.
    void phase_b();
    /// Only the giant cyber component survives.
    void phase_c();
    /// Newly failed cyber nodes fail their coupled power buses.
    void phase_d();

    [[nodiscard]] bool check_blackout() const;
    [[nodiscard]] bool stopped() const { return stopped_; }
    void begin_iteration() { ++iteration_; }

    [[nodiscard]] const PowerNetwork& power() const { return power_; }
    [[nodiscard]] const std::optional<CyberNetwork>& cyber() const { return cyber_; }
    [[nodiscard]] int iteration() const { return iteration_; }
    [[nodiscard]] int initial_buses() const { return n0_; }
    [[nodiscard]] int initial_branches() const { return m0_; }
    [[nodiscard]] double initial_load_mw() const { return l0_; }

    /// Buses/branches that went out of service since the previous phase B, as
    /// determined at the end of the latest phase A.
    [[nodiscard]] const std::vector<int>& new_failed_buses() const { return new_failed_buses_; }
    [[nodiscard]] const std::vector<int>& new_failed_branches() const { return new_failed_branches_; }
    /// Cyber nodes/edges failed by the latest phase C.
    [[nodiscard]] const std::vector<int>& new_failed_cyber_nodes() const { return new_failed_cyber_nodes_; }
    [[nodiscard]] const std::vector<int>& new_failed_cyber_edges() const { return new_failed_cyber_edges_; }

    [[nodiscard]] const std::set<int>& failed_buses() const { return failed_buses_; }
    [[nodiscard]] const std::set<int>& failed_branches() const { return failed_branches_; }
    [[nodiscard]] const std::set<int>& failed_cyber_nodes() const { return failed_cyber_nodes_; }
    [[nodiscard]] const std::set<int>& failed_cyber_edges() const { return failed_cyber_edges_; }

    [[nodiscard]] const std::vector<PhaseSnapshot>& phase_log() const { return log_; }

  private:
    void refresh_failed_sets();
    void record(Phase phase);

    PowerNetwork power_;
    std::optional<CyberNetwork> cyber_;
    CascadeOptions options_;
    int n0_ = 0;
    int m0_ = 0;
    double l0_ = 0.0;
    int iteration_ = 0;
    bool stopped_ = false;
    bool phase_a_tripped_ = false;

    std::vector<bool> bus_up_at_last_b_;
    std::vector<bool> branch_up_at_last_b_;
    std::vector<bool> cyber_edge_up_at_last_c_;
    std::vector<int> new_failed_buses_;
    std::vector<int> new_failed_branches_;
    std::vector<int> new_failed_cyber_nodes_;
    std::vector<int> new_failed_cyber_edges_;
    std::set<int> failed_buses_;
    std::set<int> failed_branches_;
    std::set<int> failed_cyber_nodes_;
    std::set<int> failed_cyber_edges_;
    std::vector<PhaseSnapshot> log_;
};

struct CascadeResult {
    bool blackout = false;
    /// The iteration cap (initial buses + branches + 1) was reached.
    bool abnormal = false;
    int iterations = 0;
    double served_load_mw = 0.0;
    double shed_load_mw = 0.0;  // demand cut by the shedding ladder on live buses
    double lost_load_mw = 0.0;  // demand on failed buses
    Grid grid;
};

/// Trigger followed by phases A-D until a stop condition, then the blackout check.
CascadeResult run_cascade(PowerNetwork power, std::optional<CyberNetwork> cyber,
                          std::span<const int> attacked_buses, std::span<const int> attacked_branches,
                          const CascadeOptions& options = {});

/// Solves the intact network (with islanding and shedding) and fills missing
/// branch ratings from its flows. Throws InputError if no island of the intact
/// network can be solved.
PowerNetwork prepare_ratings(PowerNetwork network, const RatingOptions& ratings = {},
                             const SolverOptions& solver = {});

}  // namespace gridcascade
