#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gridcascade/cascade.hpp"
#include "gridcascade/cyber.hpp"
#include "gridcascade/network.hpp"

namespace gridcascade {

enum class AttackTarget { buses, branches };

struct SweepSpec {
    AttackTarget target = AttackTarget::buses;
    int k_min = 0;
    int k_max = 0;
    int runs = 1;
    std::uint64_t seed = 0;
    SolverOptions solver;
    int threads = 1;
};

struct SweepConfig {
    std::filesystem::path case_path;
    CyberSource cyber;
    CaseOptions case_options;
    RatingOptions ratings;
    SweepSpec spec;
};

struct SweepPoint {
    int k = 0;
    int runs = 0;
    int blackouts = 0;
    double probability = 0.0;
    double ci95 = 0.0;  // normal-approximation half-width
};

struct SweepResult {
    std::vector<SweepPoint> points;
    int abnormal_runs = 0;
};

/// Seed of run `run` at attack size `k`; independent of the number of runs.
std::uint64_t run_seed(std::uint64_t master, int k, int run);

/// Uniform sample of k distinct in-service buses or branches, ascending.
/// Throws InputError if k exceeds the population.
std::vector<int> sample_attack(std::mt19937_64& rng, int k, AttackTarget target, const PowerNetwork& network);

/// Blackout statistics over `spec.runs` random attacks for each k in
/// [k_min, k_max]. `network` must already carry ratings (see prepare_ratings).
/// Results do not depend on `spec.threads`.
SweepResult run_sweep(const PowerNetwork& network, const std::optional<CyberNetwork>& cyber,
                      const SweepSpec& spec);

/// Loads the case, fills ratings, builds the cyber layer and runs the sweep.
SweepResult run_sweep(const SweepConfig& config);

/// `k,runs,blackouts,probability,ci95` with one row per k.
std::string format_sweep_csv(const SweepResult& result);

}  // namespace gridcascade
