#include "gridcascade/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridcascade {
namespace {

/// Dual potentials and matching from the Hungarian method (1-based internally).
struct HungarianResult {
    std::vector<double> row_potential;
    std::vector<double> col_potential;
    std::vector<int> column_of_row;
};

HungarianResult hungarian(std::span<const double> cost, int n) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const auto at = [&](int i, int j) { return cost[static_cast<std::size_t>(i - 1) * n + (j - 1)]; };
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = row_of_col[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = at(i0, j) - u[i0] - v[j];
                if (reduced < min_slack[j]) {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[j0] != 0);
        do {
            const int j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    HungarianResult out;
    out.row_potential.assign(u.begin() + 1, u.end());
    out.col_potential.assign(v.begin() + 1, v.end());
    out.column_of_row.assign(n, -1);
    for (int j = 1; j <= n; ++j) out.column_of_row[row_of_col[j] - 1] = j - 1;
    return out;
}

}  // namespace

Assignment solve_assignment(std::span<const double> cost, int n) {
    if (n < 0 || cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw std::invalid_argument("solve_assignment: cost matrix must be n x n");
    }
    Assignment result;
    if (n == 0) return result;

    const auto dual = hungarian(cost, n);
    double scale = 1.0;
    for (double c : cost) scale = std::max(scale, std::abs(c));
    const double eps = 1e-9 * scale;
    const auto at = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; };
    // Every optimal matching uses only edges that are tight under the optimal duals.
    const auto tight = [&](int i, int j) {
        return at(i, j) - dual.row_potential[i] - dual.col_potential[j] <= eps;
    };

    std::vector<int> col_of_row = dual.column_of_row;
    std::vector<int> row_of_col(n, -1);
    for (int i = 0; i < n; ++i) row_of_col[col_of_row[i]] = i;
    std::vector<bool> col_fixed(n, false);

    // Augmenting path from `row` to `target` over tight edges, touching only
    // rows after `first_free_row` and unfixed columns.
    std::vector<bool> visited(n);
    auto augment = [&](auto&& self, int row, int target, int first_free_row) -> bool {
        for (int c = 0; c < n; ++c) {
            if (visited[c] || col_fixed[c] || !tight(row, c)) continue;
            visited[c] = true;
            const int owner = c == target ? -1 : row_of_col[c];
            if (owner >= 0 && owner <= first_free_row) continue;
            if (owner < 0 || self(self, owner, target, first_free_row)) {
                col_of_row[row] = c;
                row_of_col[c] = row;
                return true;
            }
        }
        return false;
    };

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (col_fixed[j] || !tight(i, j)) continue;
            if (col_of_row[i] == j) break;
            // Try i -> j; the displaced row must reach i's current column.
            const int freed = col_of_row[i];
            const int displaced = row_of_col[j];
            std::fill(visited.begin(), visited.end(), false);
            visited[j] = true;
            col_fixed[j] = true;
            const bool ok = augment(augment, displaced, freed, i);
            col_fixed[j] = false;
            if (ok) {
                col_of_row[i] = j;
                row_of_col[j] = i;
                break;
            }
        }
        col_fixed[col_of_row[i]] = true;
    }

    result.column_of_row = std::move(col_of_row);
    for (int i = 0; i < n; ++i) result.cost += at(i, result.column_of_row[i]);
    return result;
}

}  // namespace gridcascade
