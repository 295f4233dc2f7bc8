#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace gridcascade;
namespace gt = gridcascade::testing;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Reference states, computed once by the brute-force oracle and an
// independent complex-admittance root finder.
constexpr double kTwoBusTheta2 = -0.05059790739303095;
constexpr double kTwoBusV2 = 0.9886049348655145;
constexpr double kThreeBusTheta2 = -0.004470053166083038;
constexpr double kThreeBusTheta3 = -0.0911519719178862;
constexpr double kThreeBusV3 = 0.9522713017659389;

Branch make_branch(double g, double b, double b_c, double tap = 1.0, double shift = 0.0) {
    Branch br;
    br.g = g;
    br.b = b;
    br.b_c = b_c;
    br.tap = tap;
    br.shift = shift;
    return br;
}

// Terminal power from the complex two-port, S = V conj(I).
BranchFlow complex_flow(const Branch& br, double vl, double vm, double tl, double tm) {
    using cd = std::complex<double>;
    const cd ys(br.g, br.b), half(0.0, br.b_c / 2.0);
    const cd a = std::polar(br.tap, br.shift);
    const cd el = std::polar(vl, tl), em = std::polar(vm, tm);
    const cd il = (ys + half) / (br.tap * br.tap) * el - ys / std::conj(a) * em;
    const cd im = (ys + half) * em - ys / a * el;
    const cd sl = el * std::conj(il), sm = em * std::conj(im);
    return {sl.real(), sl.imag(), sm.real(), sm.imag()};
}

double total_generation_pu(const PowerNetwork& net, const PowerFlowSolution& sol) {
    double load = 0.0;
    for (const auto& l : net.loads) {
        if (net.buses[l.bus].in_service) load += l.scale * l.p / net.base_mva;
    }
    double injection = 0.0;
    for (const auto& bus : net.buses) {
        if (bus.in_service) injection += sol.p_injection[bus.id];
    }
    return injection + load;
}

}  // namespace

TEST(BusMismatch, Examples) {
    gt::NetworkBuilder balanced;
    balanced.bus(BusKind::slack);
    balanced.generator(0, 100.0, 200.0);
    balanced.load(0, 100.0);
    std::vector<double> vm{1.0}, va{0.0};
    EXPECT_DOUBLE_EQ(bus_mismatch(balanced.build(), vm, va)[0].dp, 0.0);

    gt::NetworkBuilder no_gen;
    no_gen.bus(BusKind::pq);
    no_gen.load(0, 50.0);
    EXPECT_DOUBLE_EQ(bus_mismatch(no_gen.build(), vm, va)[0].dp, -0.5);

    const auto two = gt::two_bus(0.5, 0.1);
    std::vector<double> vm2{1.0, 1.0}, va2{0.0, 0.0};
    const auto mis = bus_mismatch(two, vm2, va2);
    EXPECT_DOUBLE_EQ(mis[1].dp, -0.5);
    EXPECT_DOUBLE_EQ(mis[1].dq, -0.1);
}

TEST(BusMismatch, ShuntTerms) {
    gt::NetworkBuilder b;
    b.bus(BusKind::pq, 1.0, 0.1, 0.3);
    std::vector<double> vm{1.1}, va{0.0};
    const auto mis = bus_mismatch(b.build(), vm, va);
    EXPECT_NEAR(mis[0].dp, -0.1 * 1.21, 1e-15);
    EXPECT_NEAR(mis[0].dq, 0.3 * 1.21, 1e-15);
}

TEST(LineFlow, Examples) {
    const auto f = line_flow(make_branch(2.0, -7.0, 0.4), 1.0, 1.0, 0.3, 0.3);
    EXPECT_NEAR(f.p_lm, 0.0, 1e-15);
    EXPECT_NEAR(f.p_ml, 0.0, 1e-15);
    EXPECT_NEAR(f.q_lm, -0.2, 1e-15);
    EXPECT_NEAR(f.q_ml, -0.2, 1e-15);

    const auto lossless = line_flow(make_branch(0.0, -10.0, 0.0), 1.0, 1.0, 0.1, 0.0);
    EXPECT_NEAR(lossless.p_lm, 0.99833, 5e-6);
    EXPECT_NEAR(lossless.p_ml, -0.99833, 5e-6);
    EXPECT_EQ(lossless.p_lm + lossless.p_ml, 0.0);

    const auto lossy = line_flow(make_branch(1.0, -5.0, 0.0), 1.0, 0.95, 0.0, 0.0);
    EXPECT_NEAR(lossy.p_lm, 0.05, 1e-14);
    EXPECT_NEAR(lossy.p_ml, -0.0475, 1e-14);
    EXPECT_NEAR(lossy.p_lm + lossy.p_ml, 0.0025, 1e-14);
}

TEST(LineFlow, AngleDifferenceIsFromMinusTo) {
    const auto br = make_branch(0.5, -4.0, 0.1);
    const auto a = line_flow(br, 1.02, 0.97, 0.4, 0.1);
    const auto b = line_flow(br, 1.02, 0.97, 0.3, 0.0);
    EXPECT_NEAR(a.p_lm, b.p_lm, 1e-14);
    EXPECT_NEAR(a.q_ml, b.q_ml, 1e-14);
    EXPECT_GT(a.p_lm, 0.0);
}

TEST(LineFlow, MatchesComplexTwoPortWithTaps) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto br = make_branch(5.0 * u(rng), -20.0 * u(rng), 0.3 * u(rng), 0.85 + 0.3 * u(rng),
                                    (u(rng) - 0.5) * 0.4);
        const double vl = 0.8 + 0.4 * u(rng), vm = 0.8 + 0.4 * u(rng);
        const double tl = u(rng) - 0.5, tm = u(rng) - 0.5;
        const auto f = line_flow(br, vl, vm, tl, tm);
        const auto ref = complex_flow(br, vl, vm, tl, tm);
        EXPECT_NEAR(f.p_lm, ref.p_lm, 1e-12);
        EXPECT_NEAR(f.q_lm, ref.q_lm, 1e-12);
        EXPECT_NEAR(f.p_ml, ref.p_ml, 1e-12);
        EXPECT_NEAR(f.q_ml, ref.q_ml, 1e-12);
    }
}

TEST(LineFlow, LosslessAntisymmetryAndLossSign) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double vl = 0.7 + 0.6 * u(rng), vm = 0.7 + 0.6 * u(rng);
        const double tl = 2.0 * u(rng) - 1.0, tm = 2.0 * u(rng) - 1.0;
        const auto lossless = line_flow(make_branch(0.0, -30.0 * u(rng), 0.0), vl, vm, tl, tm);
        EXPECT_EQ(lossless.p_lm + lossless.p_ml, 0.0);
        const auto lossy = line_flow(make_branch(10.0 * u(rng), -30.0 * u(rng), 0.5 * u(rng)), vl, vm, tl, tm);
        EXPECT_GE(lossy.p_lm + lossy.p_ml, -1e-15);
    }
}

TEST(Solve, ZeroInjectionIsFlat) {
    gt::NetworkBuilder b;
    b.bus(BusKind::slack);
    b.bus(BusKind::pq);
    b.bus(BusKind::pq);
    b.branch(0, 1, 0.01, 0.1);
    b.branch(1, 2, 0.01, 0.1);
    const auto sol = solve(b.build());
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.iterations, 1);
    for (double v : sol.v_mag) EXPECT_DOUBLE_EQ(v, 1.0);
    for (double a : sol.v_ang) EXPECT_DOUBLE_EQ(a, 0.0);
}

TEST(Solve, TwoBusMatchesReference) {
    const auto sol = solve(gt::two_bus(0.5, 0.1));
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.max_mismatch, 1e-8);
    EXPECT_EQ(sol.v_ang[0], 0.0);
    EXPECT_NEAR(sol.v_ang[1], kTwoBusTheta2, 1e-9);
    EXPECT_NEAR(sol.v_mag[1], kTwoBusV2, 1e-9);
    EXPECT_NEAR(sol.flows[0].p_ml, -0.5, 1e-8);
}

TEST(Solve, ThreeBusMatchesReference) {
    const auto sol = solve(gt::three_bus());
    ASSERT_TRUE(sol.converged);
    EXPECT_NEAR(sol.v_ang[1], kThreeBusTheta2, 1e-9);
    EXPECT_NEAR(sol.v_ang[2], kThreeBusTheta3, 1e-9);
    EXPECT_NEAR(sol.v_mag[2], kThreeBusV3, 1e-9);
    EXPECT_DOUBLE_EQ(sol.v_mag[1], 1.01);
}

TEST(Oracle, ReproducesFrozenReferences) {
    const auto two = gt::brute_force_power_flow(gt::two_bus(0.5, 0.1), 201);
    EXPECT_LT(two.residual, 1e-10);
    EXPECT_NEAR(two.v_ang[1], kTwoBusTheta2, 1e-8);
    EXPECT_NEAR(two.v_mag[1], kTwoBusV2, 1e-8);
    const auto three = gt::brute_force_power_flow(gt::three_bus(), 41);
    EXPECT_LT(three.residual, 1e-10);
    EXPECT_NEAR(three.v_ang[1], kThreeBusTheta2, 1e-8);
    EXPECT_NEAR(three.v_ang[2], kThreeBusTheta3, 1e-8);
    EXPECT_NEAR(three.v_mag[2], kThreeBusV3, 1e-8);
}

TEST(Solve, BeyondNosePointDoesNotConverge) {
    // With Q = 0.2 P through x = 0.1 from a 1.0 p.u. source, solutions exist
    // only for P <= 4.099 p.u.
    for (double p : {4.2, 5.0, 100.0}) {
        const auto net = gt::two_bus(p, 0.2 * p);
        const auto sol = solve(net);
        EXPECT_FALSE(sol.converged) << p;
        EXPECT_GT(gt::brute_force_power_flow(net, 201).residual, 1e-3) << p;
    }
    const auto near_nose = gt::two_bus(4.0, 0.8);
    EXPECT_LT(gt::brute_force_power_flow(near_nose, 201).residual, 1e-8);
}

TEST(Solve, PublishedCasesMatchReferenceSolver) {
    const auto c30 = load_case(gt::data_path("cases/case30.m"));
    const auto s30 = solve(c30);
    ASSERT_TRUE(s30.converged);
    const auto bus = [&](const PowerNetwork& n, int number) { return *n.find_bus(number); };
    EXPECT_NEAR(s30.v_mag[bus(c30, 5)], 0.982406196788543, 1e-7);
    EXPECT_NEAR(s30.v_ang[bus(c30, 5)], -1.8638226717444473 * kDeg, 1e-7);
    EXPECT_NEAR(s30.v_mag[bus(c30, 30)], 0.9678828791877787, 1e-7);
    EXPECT_NEAR(s30.v_ang[bus(c30, 30)], -3.0415235838794477 * kDeg, 1e-7);
    // Bus 1 is the slack and carries no load.
    EXPECT_NEAR(s30.p_injection[bus(c30, 1)] * c30.base_mva, 25.973803136777484, 1e-5);

    const auto c118 = load_case(gt::data_path("cases/case118.m"));
    const auto s118 = solve(c118);
    ASSERT_TRUE(s118.converged);
    // Angles are relative to the slack (bus 69).
    EXPECT_NEAR(s118.v_mag[bus(c118, 58)], 0.9590386715723095, 1e-7);
    EXPECT_NEAR(s118.v_ang[bus(c118, 58)], -14.40751574676224 * kDeg, 1e-7);
    EXPECT_NEAR(s118.v_mag[bus(c118, 117)], 0.9738244468092152, 1e-7);
    EXPECT_NEAR(s118.v_ang[bus(c118, 1)], -19.027260018562806 * kDeg, 1e-7);
}

TEST(Solve, RandomIslandInvariants) {
    std::mt19937_64 rng(101);
    int converged = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = gt::random_island(rng, 2 + trial % 15);
        const auto sol = solve(net);
        if (!sol.converged) continue;
        ++converged;
        EXPECT_LE(sol.max_mismatch, 1e-8);
        MismatchSystem system(net);
        EXPECT_EQ(sol.v_ang[system.slack_bus()], 0.0);
        const auto mis = bus_mismatch(net, sol.v_mag, sol.v_ang);
        double loss = 0.0, shunt = 0.0, load = 0.0, gen = 0.0;
        for (const auto& bus : net.buses) {
            EXPECT_GT(sol.v_mag[bus.id], 0.0);
            if (bus.kind != BusKind::slack) EXPECT_LE(std::abs(mis[bus.id].dp), 1e-8);
            if (bus.kind == BusKind::pq) EXPECT_LE(std::abs(mis[bus.id].dq), 1e-8);
            shunt += bus.g_sh * sol.v_mag[bus.id] * sol.v_mag[bus.id];
        }
        for (const auto& br : net.branches) {
            const auto& f = sol.flows[br.id];
            loss += f.p_lm + f.p_ml;
            EXPECT_GE(f.p_lm + f.p_ml, -1e-12);
        }
        for (const auto& l : net.loads) load += l.p / net.base_mva;
        gen = total_generation_pu(net, sol);
        EXPECT_NEAR(gen, load + loss + shunt, 1e-6);
    }
    EXPECT_GT(converged, 150);
}

TEST(MismatchSystem, RequiresExactlyOneSlack) {
    auto net = gt::three_bus();
    net.buses[0].kind = BusKind::pq;
    EXPECT_THROW(MismatchSystem{net}, std::invalid_argument);
    net.buses[0].kind = BusKind::slack;
    net.buses[2].kind = BusKind::slack;
    EXPECT_THROW(MismatchSystem{net}, std::invalid_argument);
}

TEST(MismatchSystem, PvWithoutGeneratorIsPq) {
    auto net = gt::three_bus();
    net.generators[1].in_service = false;
    MismatchSystem system(net);
    EXPECT_TRUE(system.is_pq(1));
    EXPECT_EQ(system.size(), 4);
}

TEST(MismatchSystem, JacobianMatchesCentralDifferences) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto net = gt::random_island(rng, 2 + trial % 10);
        MismatchSystem system(net);
        std::vector<double> vm, va;
        system.initial_voltages(true, vm, va);
        for (auto& bus : net.buses) {
            va[bus.id] = bus.kind == BusKind::slack ? 0.0 : 0.2 * u(rng);
            if (system.is_pq(bus.id)) vm[bus.id] = 1.0 + 0.1 * u(rng);
        }
        const Eigen::MatrixXd analytic = system.jacobian(vm, va);
        const Eigen::VectorXd x0 = system.pack(vm, va);
        const double h = 1e-6;
        Eigen::MatrixXd numeric(system.size(), system.size());
        for (int c = 0; c < system.size(); ++c) {
            Eigen::VectorXd xp = x0, xm = x0;
            xp[c] += h;
            xm[c] -= h;
            std::vector<double> vmp = vm, vap = va, vmm = vm, vam = va;
            system.unpack(xp, vmp, vap);
            system.unpack(xm, vmm, vam);
            numeric.col(c) = (system.residual(vmp, vap) - system.residual(vmm, vam)) / (2.0 * h);
        }
        const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
        EXPECT_LE((analytic - numeric).cwiseAbs().maxCoeff() / scale, 1e-6);
    }
}

TEST(BranchLoading, Examples) {
    EXPECT_DOUBLE_EQ(branch_loading_percent({0.5, 0.0, -0.5, 0.0}, 100.0, 100.0), 50.0);
    EXPECT_NEAR(branch_loading_percent({0.6, 0.0, -0.62, 0.0}, 60.0, 100.0), 103.33333333333333, 1e-12);
    EXPECT_DOUBLE_EQ(branch_loading_percent({0.0, 0.0, 0.0, 0.0}, 60.0, 100.0), 0.0);
    EXPECT_NEAR(branch_loading_percent({0.3, 0.4, -0.3, -0.38}, 100.0, 100.0), 50.0, 1e-12);
    EXPECT_THROW(branch_loading_percent({}, 0.0, 100.0), std::invalid_argument);
}
