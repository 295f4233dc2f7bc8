#include "gridcascade/power_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace gridcascade {
namespace {

struct Partials {
    double th_l = 0.0;
    double th_m = 0.0;
    double v_l = 0.0;
    double v_m = 0.0;
};

struct BranchTerms {
    Partials p_lm, q_lm, p_ml, q_ml;
};

/// Partial derivatives of the four terminal flows of `line_flow`.
BranchTerms branch_terms(const Branch& br, double v_l, double v_m, double theta_l, double theta_m) {
    const double t = br.tap;
    const double th = theta_l - theta_m - br.shift;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double g = br.g;
    const double b = br.b;
    const double bsh = b + br.b_c / 2.0;
    const double vv = v_l * v_m / t;

    BranchTerms out;
    out.p_lm.th_l = -vv * (b * c - g * s);
    out.p_lm.th_m = -out.p_lm.th_l;
    out.p_lm.v_l = 2.0 * g * v_l / (t * t) - v_m / t * (g * c + b * s);
    out.p_lm.v_m = -v_l / t * (g * c + b * s);

    out.q_lm.th_l = -vv * (g * c + b * s);
    out.q_lm.th_m = -out.q_lm.th_l;
    out.q_lm.v_l = -2.0 * bsh * v_l / (t * t) - v_m / t * (g * s - b * c);
    out.q_lm.v_m = -v_l / t * (g * s - b * c);

    out.p_ml.th_l = vv * (g * s + b * c);
    out.p_ml.th_m = -out.p_ml.th_l;
    out.p_ml.v_l = -v_m / t * (g * c - b * s);
    out.p_ml.v_m = 2.0 * g * v_m - v_l / t * (g * c - b * s);

    out.q_ml.th_l = vv * (g * c - b * s);
    out.q_ml.th_m = -out.q_ml.th_l;
    out.q_ml.v_l = v_m / t * (g * s + b * c);
    out.q_ml.v_m = -2.0 * bsh * v_m + v_l / t * (g * s + b * c);
    return out;
}

/// Network-side injections g_sh V^2 + sum P and -b_sh V^2 + sum Q at every bus.
void network_injections(const PowerNetwork& net, std::span<const double> v_mag,
                        std::span<const double> v_ang, std::vector<double>& p,
                        std::vector<double>& q) {
    p.assign(net.buses.size(), 0.0);
    q.assign(net.buses.size(), 0.0);
    for (const auto& bus : net.buses) {
        if (!bus.in_service) continue;
        const double v2 = v_mag[bus.id] * v_mag[bus.id];
        p[bus.id] += bus.g_sh * v2;
        q[bus.id] -= bus.b_sh * v2;
    }
    for (const auto& br : net.branches) {
        if (!br.in_service) continue;
        const auto f = line_flow(br, v_mag[br.from_bus], v_mag[br.to_bus], v_ang[br.from_bus],
                                 v_ang[br.to_bus]);
        p[br.from_bus] += f.p_lm;
        q[br.from_bus] += f.q_lm;
        p[br.to_bus] += f.p_ml;
        q[br.to_bus] += f.q_ml;
    }
}

void scheduled_injections(const PowerNetwork& net, std::vector<double>& p, std::vector<double>& q) {
    p.assign(net.buses.size(), 0.0);
    q.assign(net.buses.size(), 0.0);
    for (const auto& gen : net.generators) {
        if (!gen.in_service || !net.buses[gen.bus].in_service) continue;
        p[gen.bus] += gen.p_set / net.base_mva;
        q[gen.bus] += gen.q_set / net.base_mva;
    }
    for (const auto& load : net.loads) {
        if (!net.buses[load.bus].in_service) continue;
        p[load.bus] -= load.scale * load.p / net.base_mva;
        q[load.bus] -= load.scale * load.q / net.base_mva;
    }
}

}  // namespace

BranchFlow line_flow(const Branch& branch, double v_l, double v_m, double theta_l, double theta_m) {
    const double t = branch.tap;
    const double th = theta_l - theta_m - branch.shift;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double g = branch.g;
    const double b = branch.b;
    const double bsh = b + branch.b_c / 2.0;
    const double vv = v_l * v_m / t;
    return {
        g * v_l * v_l / (t * t) - g * vv * c - b * vv * s,
        -bsh * v_l * v_l / (t * t) + b * vv * c - g * vv * s,
        g * v_m * v_m - g * vv * c + b * vv * s,
        -bsh * v_m * v_m + b * vv * c + g * vv * s,
    };
}

std::vector<BusMismatch> bus_mismatch(const PowerNetwork& network, std::span<const double> v_mag,
                                      std::span<const double> v_ang) {
    std::vector<double> p_net, q_net, p_sched, q_sched;
    network_injections(network, v_mag, v_ang, p_net, q_net);
    scheduled_injections(network, p_sched, q_sched);
    std::vector<BusMismatch> out(network.buses.size());
    for (const auto& bus : network.buses) {
        if (!bus.in_service) continue;
        out[bus.id] = {p_sched[bus.id] - p_net[bus.id], q_sched[bus.id] - q_net[bus.id]};
    }
    return out;
}

MismatchSystem::MismatchSystem(const PowerNetwork& network) : net_(network) {
    const auto n = network.buses.size();
    kind_.assign(n, BusKind::pq);
    std::vector<bool> has_gen(n, false);
    for (const auto& gen : network.generators) {
        if (gen.in_service) has_gen[gen.bus] = true;
    }
    for (const auto& bus : network.buses) {
        if (!bus.in_service) continue;
        if (bus.kind == BusKind::slack) {
            if (slack_ >= 0) throw std::invalid_argument("island has more than one slack bus");
            slack_ = bus.id;
            kind_[bus.id] = BusKind::slack;
        } else if (bus.kind == BusKind::pv && has_gen[bus.id]) {
            kind_[bus.id] = BusKind::pv;
        }
    }
    if (slack_ < 0) throw std::invalid_argument("island has no slack bus");

    scheduled_injections(network, p_sched_, q_sched_);
    angle_col_.assign(n, -1);
    magnitude_col_.assign(n, -1);
    for (const auto& bus : network.buses) {
        if (!bus.in_service || bus.id == slack_) continue;
        angle_col_[bus.id] = static_cast<int>(angle_buses_.size());
        angle_buses_.push_back(bus.id);
    }
    for (const auto& bus : network.buses) {
        if (!bus.in_service || kind_[bus.id] != BusKind::pq) continue;
        magnitude_col_[bus.id] = static_cast<int>(angle_buses_.size() + magnitude_buses_.size());
        magnitude_buses_.push_back(bus.id);
    }
}

void MismatchSystem::initial_voltages(bool flat_start, std::vector<double>& v_mag,
                                      std::vector<double>& v_ang) const {
    const auto n = net_.buses.size();
    v_mag.assign(n, 1.0);
    v_ang.assign(n, 0.0);
    for (const auto& bus : net_.buses) {
        if (!bus.in_service) continue;
        if (kind_[bus.id] != BusKind::pq || !flat_start) v_mag[bus.id] = bus.v_mag;
        if (!flat_start && bus.id != slack_) v_ang[bus.id] = bus.v_ang;
    }
}

Eigen::VectorXd MismatchSystem::pack(std::span<const double> v_mag, std::span<const double> v_ang) const {
    Eigen::VectorXd x(size());
    for (std::size_t k = 0; k < angle_buses_.size(); ++k) x[static_cast<Eigen::Index>(k)] = v_ang[angle_buses_[k]];
    const auto offset = angle_buses_.size();
    for (std::size_t k = 0; k < magnitude_buses_.size(); ++k) {
        x[static_cast<Eigen::Index>(offset + k)] = v_mag[magnitude_buses_[k]];
    }
    return x;
}

void MismatchSystem::unpack(const Eigen::VectorXd& x, std::vector<double>& v_mag,
                            std::vector<double>& v_ang) const {
    for (std::size_t k = 0; k < angle_buses_.size(); ++k) v_ang[angle_buses_[k]] = x[static_cast<Eigen::Index>(k)];
    const auto offset = angle_buses_.size();
    for (std::size_t k = 0; k < magnitude_buses_.size(); ++k) {
        v_mag[magnitude_buses_[k]] = x[static_cast<Eigen::Index>(offset + k)];
    }
}

Eigen::VectorXd MismatchSystem::residual(std::span<const double> v_mag, std::span<const double> v_ang) const {
    std::vector<double> p_net, q_net;
    network_injections(net_, v_mag, v_ang, p_net, q_net);
    Eigen::VectorXd f(size());
    Eigen::Index row = 0;
    for (int bus : angle_buses_) f[row++] = p_sched_[bus] - p_net[bus];
    for (int bus : magnitude_buses_) f[row++] = q_sched_[bus] - q_net[bus];
    return f;
}

Eigen::SparseMatrix<double> MismatchSystem::jacobian(std::span<const double> v_mag,
                                                     std::span<const double> v_ang) const {
    // Rows: dP of bus i at angle_col_[i], dQ of bus i at magnitude_col_[i]
    // (the row layout mirrors the column layout). Residual = scheduled - network,
    // so every network derivative enters with a minus sign.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(net_.branches.size() * 16 + net_.buses.size());

    auto add = [&](int row_bus, bool is_p, int bus_l, int bus_m, const Partials& d) {
        const int row = is_p ? angle_col_[row_bus] : magnitude_col_[row_bus];
        if (row < 0) return;
        auto put = [&](int col, double value) {
            if (col >= 0 && value != 0.0) triplets.emplace_back(row, col, -value);
        };
        put(angle_col_[bus_l], d.th_l);
        put(angle_col_[bus_m], d.th_m);
        put(magnitude_col_[bus_l], d.v_l);
        put(magnitude_col_[bus_m], d.v_m);
    };

    for (const auto& br : net_.branches) {
        if (!br.in_service) continue;
        const int l = br.from_bus;
        const int m = br.to_bus;
        const auto terms = branch_terms(br, v_mag[l], v_mag[m], v_ang[l], v_ang[m]);
        add(l, true, l, m, terms.p_lm);
        add(l, false, l, m, terms.q_lm);
        add(m, true, l, m, terms.p_ml);
        add(m, false, l, m, terms.q_ml);
    }
    for (const auto& bus : net_.buses) {
        if (!bus.in_service) continue;
        const int col = magnitude_col_[bus.id];
        if (col < 0) continue;
        const double v = v_mag[bus.id];
        if (angle_col_[bus.id] >= 0 && bus.g_sh != 0.0) {
            triplets.emplace_back(angle_col_[bus.id], col, -2.0 * bus.g_sh * v);
        }
        if (bus.b_sh != 0.0) triplets.emplace_back(col, col, 2.0 * bus.b_sh * v);
    }

    Eigen::SparseMatrix<double> jac(size(), size());
    jac.setFromTriplets(triplets.begin(), triplets.end());
    return jac;
}

PowerFlowSolution solve(const PowerNetwork& network, const SolverOptions& options) {
    const MismatchSystem system(network);
    PowerFlowSolution sol;
    system.initial_voltages(options.flat_start, sol.v_mag, sol.v_ang);

    constexpr double kDivergence = 1e10;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool failed = false;
    while (true) {
        const Eigen::VectorXd f = system.residual(sol.v_mag, sol.v_ang);
        sol.max_mismatch = f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
        if (!std::isfinite(sol.max_mismatch) || sol.max_mismatch > kDivergence) {
            failed = true;
            break;
        }
        if (sol.max_mismatch <= options.tol) break;
        if (sol.iterations >= options.max_iter) {
            failed = true;
            break;
        }
        const auto jac = system.jacobian(sol.v_mag, sol.v_ang);
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            failed = true;
            break;
        }
        const Eigen::VectorXd dx = lu.solve(-f);
        if (lu.info() != Eigen::Success || !dx.allFinite()) {
            failed = true;
            break;
        }
        Eigen::VectorXd x = system.pack(sol.v_mag, sol.v_ang) + dx;
        system.unpack(x, sol.v_mag, sol.v_ang);
        ++sol.iterations;
    }

    const bool positive = std::ranges::all_of(network.buses, [&](const Bus& bus) {
        return !bus.in_service || sol.v_mag[bus.id] > 0.0;
    });
    sol.converged = !failed && positive;

    sol.flows.assign(network.branches.size(), BranchFlow{});
    for (const auto& br : network.branches) {
        if (!br.in_service) continue;
        sol.flows[br.id] = line_flow(br, sol.v_mag[br.from_bus], sol.v_mag[br.to_bus],
                                     sol.v_ang[br.from_bus], sol.v_ang[br.to_bus]);
    }
    network_injections(network, sol.v_mag, sol.v_ang, sol.p_injection, sol.q_injection);
    return sol;
}

double branch_loading_percent(const BranchFlow& flow, double rating_mva, double base_mva) {
    if (!(rating_mva > 0.0)) throw std::invalid_argument("branch rating must be positive");
    const double s_lm = std::hypot(flow.p_lm, flow.q_lm);
    const double s_ml = std::hypot(flow.p_ml, flow.q_ml);
    return 100.0 * std::max(s_lm, s_ml) * base_mva / rating_mva;
}

}  // namespace gridcascade
