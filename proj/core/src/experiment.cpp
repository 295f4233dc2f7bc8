#include "gridcascade/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "gridcascade/errors.hpp"

namespace gridcascade {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master, int k, int run) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(k)));
    return splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(run)));
}

std::vector<int> sample_attack(std::mt19937_64& rng, int k, AttackTarget target, const PowerNetwork& network) {
    std::vector<int> population;
    if (target == AttackTarget::buses) {
        for (const auto& bus : network.buses) {
            if (bus.in_service) population.push_back(bus.id);
        }
    } else {
        for (const auto& br : network.branches) {
            if (br.in_service) population.push_back(br.id);
        }
    }
    if (k < 0 || k > static_cast<int>(population.size())) {
        throw InputError("attack size " + std::to_string(k) + " exceeds the " +
                         std::to_string(population.size()) + " available components");
    }
    // Partial Fisher-Yates.
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(population.size()) - 1);
        std::swap(population[i], population[pick(rng)]);
    }
    population.resize(k);
    std::ranges::sort(population);
    return population;
}

SweepResult run_sweep(const PowerNetwork& network, const std::optional<CyberNetwork>& cyber,
                      const SweepSpec& spec) {
    if (spec.runs < 1) throw InputError("runs must be at least 1");
    if (spec.k_min < 0 || spec.k_max < spec.k_min) throw InputError("invalid k range");
    const int population = spec.target == AttackTarget::buses ? network.in_service_bus_count()
                                                              : network.in_service_branch_count();
    if (spec.k_max > population) {
        throw InputError("k-max " + std::to_string(spec.k_max) + " exceeds the " + std::to_string(population) +
                         " available components");
    }

    const int k_count = spec.k_max - spec.k_min + 1;
    const std::size_t jobs = static_cast<std::size_t>(k_count) * static_cast<std::size_t>(spec.runs);
    std::vector<char> blackout(jobs, 0);
    std::vector<char> abnormal(jobs, 0);
    const CascadeOptions options{spec.solver, false};

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const int k = spec.k_min + static_cast<int>(job / spec.runs);
            const int run = static_cast<int>(job % spec.runs);
            std::mt19937_64 rng(run_seed(spec.seed, k, run));
            const auto attack = sample_attack(rng, k, spec.target, network);
            const std::vector<int> none;
            const auto result = spec.target == AttackTarget::buses
                                    ? run_cascade(network, cyber, attack, none, options)
                                    : run_cascade(network, cyber, none, attack, options);
            blackout[job] = result.blackout ? 1 : 0;
            abnormal[job] = result.abnormal ? 1 : 0;
        }
    };
    const int threads = std::max(1, spec.threads);
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    SweepResult result;
    for (int i = 0; i < k_count; ++i) {
        SweepPoint point;
        point.k = spec.k_min + i;
        point.runs = spec.runs;
        const auto first = blackout.begin() + static_cast<std::ptrdiff_t>(i) * spec.runs;
        point.blackouts = static_cast<int>(std::count(first, first + spec.runs, 1));
        point.probability = static_cast<double>(point.blackouts) / spec.runs;
        point.ci95 = 1.96 * std::sqrt(point.probability * (1.0 - point.probability) / spec.runs);
        result.points.push_back(point);
    }
    result.abnormal_runs = static_cast<int>(std::count(abnormal.begin(), abnormal.end(), 1));
    return result;
}

SweepResult run_sweep(const SweepConfig& config) {
    auto network = prepare_ratings(load_case(config.case_path, config.case_options), config.ratings,
                                   config.spec.solver);
    const auto cyber = build_cyber_topology(config.cyber, network);
    return run_sweep(network, cyber, config.spec);
}

std::string format_sweep_csv(const SweepResult& result) {
    std::string out = "k,runs,blackouts,probability,ci95\n";
    char line[128];
    for (const auto& p : result.points) {
        std::snprintf(line, sizeof line, "%d,%d,%d,%.6f,%.6f\n", p.k, p.runs, p.blackouts, p.probability, p.ci95);
        out += line;
    }
    return out;
}

}  // namespace gridcascade
