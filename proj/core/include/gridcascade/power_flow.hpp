#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridcascade/network.hpp"

namespace gridcascade {

/// Complex power entering a branch at each terminal, p.u.
struct BranchFlow {
    double p_lm = 0.0;
    double q_lm = 0.0;
    double p_ml = 0.0;
    double q_ml = 0.0;
};

struct SolverOptions {
    double tol = 1e-8;  // p.u.
    int max_iter = 20;
    bool flat_start = true;
};

struct PowerFlowSolution {
    std::vector<double> v_mag;
    std::vector<double> v_ang;
    std::vector<BranchFlow> flows;    // per branch; zero for branches out of service
    std::vector<double> p_injection;  // per bus, p.u., g_sh V^2 + sum of outgoing P
    std::vector<double> q_injection;  // per bus, p.u., -b_sh V^2 + sum of outgoing Q
    bool converged = false;
    int iterations = 0;
    double max_mismatch = std::numeric_limits<double>::infinity();
};

struct BusMismatch {
    double dp = 0.0;
    double dq = 0.0;
};

/// Terminal flows of one branch with theta_lm = theta_l - theta_m. With tap = 1
/// and no phase shift these are the plain Pi-model expressions.
BranchFlow line_flow(const Branch& branch, double v_l, double v_m, double theta_l, double theta_m);

/// Scheduled-minus-computed active/reactive power at every bus (p.u.). Entries of
/// out-of-service buses are zero. Uses generator setpoints and scaled loads as
/// the scheduled injection, so slack P and slack/PV Q are reported but not zero.
std::vector<BusMismatch> bus_mismatch(const PowerNetwork& network, std::span<const double> v_mag,
                                      std::span<const double> v_ang);

/// The reduced Newton system of one connected island: unknowns are the angles of
/// all non-slack buses followed by the magnitudes of PQ buses, residuals are dP at
/// non-slack buses followed by dQ at PQ buses.
class MismatchSystem {
  public:
    /// Requires exactly one in-service slack bus; throws std::invalid_argument otherwise.
    explicit MismatchSystem(const PowerNetwork& network);

    [[nodiscard]] int size() const { return static_cast<int>(angle_buses_.size() + magnitude_buses_.size()); }
    [[nodiscard]] int slack_bus() const { return slack_; }
    [[nodiscard]] bool is_pq(int bus) const { return kind_[bus] == BusKind::pq; }

    /// Initial voltages: setpoints at slack/PV buses, 1.0 p.u. (flat) or the
    /// stored magnitude elsewhere; all angles 0 on flat start.
    void initial_voltages(bool flat_start, std::vector<double>& v_mag, std::vector<double>& v_ang) const;

    [[nodiscard]] Eigen::VectorXd pack(std::span<const double> v_mag, std::span<const double> v_ang) const;
    void unpack(const Eigen::VectorXd& x, std::vector<double>& v_mag, std::vector<double>& v_ang) const;

    [[nodiscard]] Eigen::VectorXd residual(std::span<const double> v_mag, std::span<const double> v_ang) const;
    [[nodiscard]] Eigen::SparseMatrix<double> jacobian(std::span<const double> v_mag,
                                                       std::span<const double> v_ang) const;

  private:
    const PowerNetwork& net_;
    int slack_ = -1;
    std::vector<BusKind> kind_;
    std::vector<double> p_sched_;
    std::vector<double> q_sched_;
    std::vector<int> angle_buses_;
    std::vector<int> magnitude_buses_;
    std::vector<int> angle_col_;      // bus -> column of its angle, -1 if fixed
    std::vector<int> magnitude_col_;  // bus -> column of its magnitude, -1 if fixed
};

/// Full Newton power flow in polar coordinates. All in-service buses must form
/// one connected island with a single slack bus. Never throws on divergence:
/// the result carries converged = false instead.
PowerFlowSolution solve(const PowerNetwork& network, const SolverOptions& options = {});

/// 100 * max(|S_lm|, |S_ml|) * base_mva / rating. Throws std::invalid_argument for rating <= 0.
double branch_loading_percent(const BranchFlow& flow, double rating_mva, double base_mva);

}  // namespace gridcascade
