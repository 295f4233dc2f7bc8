#include "support/fixtures.hpp"

#include <numbers>

namespace gridcascade::testing {

std::filesystem::path data_path(const std::string& relative) {
    return std::filesystem::path(GRIDCASCADE_DATA_DIR) / relative;
}

int NetworkBuilder::bus(BusKind kind, double v_mag, double g_sh, double b_sh) {
    const int id = static_cast<int>(net_.buses.size());
    net_.buses.push_back(Bus{id, id + 1, kind, v_mag, 0.0, g_sh, b_sh, true});
    return id;
}

int NetworkBuilder::branch(int from, int to, double r, double x, double b_c, double rating) {
    const int id = static_cast<int>(net_.branches.size());
    const auto y = branch_admittance(r, x);
    Branch br;
    br.id = id;
    br.from_bus = from;
    br.to_bus = to;
    br.r = r;
    br.x = x;
    br.g = y.g;
    br.b = y.b;
    br.b_c = b_c;
    br.rating = rating;
    net_.branches.push_back(br);
    return id;
}

int NetworkBuilder::generator(int bus, double p_mw, double p_max_mw, double q_mvar) {
    net_.generators.push_back(Generator{bus, p_mw, q_mvar, p_max_mw, 0.0, true});
    return static_cast<int>(net_.generators.size()) - 1;
}

int NetworkBuilder::load(int bus, double p_mw, double q_mvar) {
    net_.loads.push_back(Load{bus, p_mw, q_mvar, 1.0});
    return static_cast<int>(net_.loads.size()) - 1;
}

PowerNetwork two_bus(double p_load_pu, double q_load_pu) {
    NetworkBuilder b;
    const int s = b.bus(BusKind::slack, 1.0);
    const int l = b.bus(BusKind::pq);
    b.branch(s, l, 0.0, 0.1);
    b.generator(s, 0.0, 1e6);
    b.load(l, 100.0 * p_load_pu, 100.0 * q_load_pu);
    return b.build();
}

PowerNetwork three_bus() {
    NetworkBuilder b;
    const int s = b.bus(BusKind::slack, 1.02);
    const int pv = b.bus(BusKind::pv, 1.01);
    const int pq = b.bus(BusKind::pq, 1.0, 0.01, 0.05);
    b.branch(s, pv, 0.02, 0.06, 0.03);
    b.branch(s, pq, 0.08, 0.24, 0.025);
    b.branch(pv, pq, 0.06, 0.18, 0.02);
    b.generator(s, 0.0, 500.0);
    b.generator(pv, 60.0, 200.0);
    b.load(pv, 20.0);
    b.load(pq, 90.0, 30.0);
    return b.build();
}

PowerNetwork two_area(bool generator_in_b) {
    NetworkBuilder b;
    const int a0 = b.bus(BusKind::slack);
    const int a1 = b.bus(BusKind::pq);
    const int b0 = b.bus(generator_in_b ? BusKind::pv : BusKind::pq);
    const int b1 = b.bus(BusKind::pq);
    b.branch(a0, a1, 0.01, 0.05);
    b.branch(a1, b0, 0.01, 0.05);
    b.branch(b0, b1, 0.01, 0.05);
    b.generator(a0, 60.0, 200.0);
    if (generator_in_b) b.generator(b0, 40.0, 100.0);
    b.load(a1, 50.0, 10.0);
    b.load(b1, 40.0, 8.0);
    return b.build();
}

PowerNetwork random_island(std::mt19937_64& rng, int n_buses) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NetworkBuilder b;
    for (int i = 0; i < n_buses; ++i) {
        const BusKind kind = i == 0 ? BusKind::slack : (u(rng) < 0.3 ? BusKind::pv : BusKind::pq);
        b.bus(kind, 0.97 + 0.08 * u(rng), u(rng) < 0.2 ? 0.02 * u(rng) : 0.0,
              u(rng) < 0.3 ? 0.2 * (u(rng) - 0.3) : 0.0);
    }
    auto add = [&](int from, int to) {
        const int id = b.branch(from, to, 0.002 + 0.05 * u(rng), 0.01 + 0.2 * u(rng), 0.05 * u(rng));
        auto& br = b.network().branches[id];
        if (u(rng) < 0.2) {
            br.tap = 0.9 + 0.2 * u(rng);
            br.shift = (u(rng) - 0.5) * 10.0 * std::numbers::pi / 180.0;
        }
    };
    for (int i = 1; i < n_buses; ++i) add(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
    for (int extra = n_buses / 3; extra > 0; --extra) {
        const int from = std::uniform_int_distribution<int>(0, n_buses - 1)(rng);
        const int to = std::uniform_int_distribution<int>(0, n_buses - 1)(rng);
        if (from != to) add(from, to);
    }
    auto& net = b.network();
    for (auto& bus : net.buses) {
        if (bus.kind != BusKind::pq) b.generator(bus.id, 20.0 + 60.0 * u(rng), 200.0, 10.0 * u(rng));
        if (u(rng) < 0.7) b.load(bus.id, 10.0 + 40.0 * u(rng), 15.0 * u(rng));
    }
    return b.build();
}

}  // namespace gridcascade::testing
