#pragma once

#include <cstddef>
#include <vector>

namespace poc {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    std::vector<double> x;
};

/**
 * Minimize c.x subject to A x = b, x >= 0. Dense two-phase tableau simplex
 * with Bland's rule throughout: these problems are tiny (response-type
 * polytopes), so anti-cycling robustness is worth more than pivot speed.
 * Redundant rows are tolerated; inconsistent ones yield Infeasible.
 */
LpResult solve_lp(const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b,
                  const std::vector<double>& c);

/**
 * Exact second route for cross-checking solve_lp: enumerate every candidate
 * basis (column subsets of size rank(A)), solve the square system, keep
 * feasible vertices, return the best objective. The feasible set of our LPs
 * is a bounded polytope (it lives inside the probability simplex), so the
 * optimum sits at a vertex. Throws std::invalid_argument when the number of
 * subsets exceeds max_bases.
 */
LpResult enumerate_vertices(const std::vector<std::vector<double>>& A,
                            const std::vector<double>& b,
                            const std::vector<double>& c,
                            std::size_t max_bases = 200000);

} // namespace poc
