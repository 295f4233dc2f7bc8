#pragma once

#include <span>
#include <vector>

namespace gridcascade {

struct Assignment {
    std::vector<int> column_of_row;
    double cost = 0.0;
};

/// Minimum-cost perfect matching on a dense n x n cost matrix (row-major),
/// O(n^3) shortest-augmenting-path Hungarian method. Among optimal matchings
/// (costs equal within a relative 1e-9) the lexicographically smallest
/// column_of_row is returned. Throws std::invalid_argument on a size mismatch.
Assignment solve_assignment(std::span<const double> cost, int n);

}  // namespace gridcascade
