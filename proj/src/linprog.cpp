#include "pocbounds/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace poc {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kFeasEps = 1e-7;

// Tableau rows 0..m-1 are constraints, row m is the objective (reduced
// costs); column `width` is the RHS. Basis columns are kept canonical.
struct Tableau {
    std::vector<std::vector<double>> t;
    std::vector<int> basis;
    int m = 0;
    int width = 0;

    double& at(int r, int c) { return t[r][c]; }

    void pivot(int row, int col) {
        const double p = t[row][col];
        for (int c = 0; c <= width; ++c) t[row][c] /= p;
        for (int r = 0; r <= m; ++r) {
            if (r == row) continue;
            const double f = t[r][col];
            if (f == 0.0) continue;
            for (int c = 0; c <= width; ++c) t[r][c] -= f * t[row][c];
        }
        basis[row] = col;
    }

    // Bland's rule: smallest eligible entering column, smallest basis index
    // on ratio ties. `allowed` masks out phase-1 artificials in phase 2.
    LpStatus run(const std::vector<char>& allowed) {
        for (;;) {
            int enter = -1;
            for (int c = 0; c < width; ++c) {
                if (allowed[c] && t[m][c] < -kPivotEps) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0) return LpStatus::Optimal;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                if (t[r][enter] <= kPivotEps) continue;
                const double ratio = t[r][width] / t[r][enter];
                if (ratio < best - kPivotEps ||
                    (ratio < best + kPivotEps &&
                     (leave < 0 || basis[r] < basis[leave]))) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
    }
};

} // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b,
                  const std::vector<double>& c) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());
    if (static_cast<int>(b.size()) != m)
        throw std::invalid_argument("solve_lp: row count mismatch");
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("solve_lp: column count mismatch");
    if (m == 0 || n == 0) throw std::invalid_argument("solve_lp: empty program");

    Tableau tab;
    tab.m = m;
    tab.width = n + m;  // artificials occupy columns n..n+m-1
    tab.t.assign(m + 1, std::vector<double>(tab.width + 1, 0.0));
    tab.basis.resize(m);
    for (int r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (int cidx = 0; cidx < n; ++cidx) tab.t[r][cidx] = sign * A[r][cidx];
        tab.t[r][n + r] = 1.0;
        tab.t[r][tab.width] = sign * b[r];
        tab.basis[r] = n + r;
    }

    // Phase 1: minimize the artificial total. Reduced costs start as
    // -(sum of constraint rows) over the original columns.
    for (int cidx = 0; cidx <= tab.width; ++cidx) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += tab.t[r][cidx];
        tab.t[m][cidx] = (cidx >= n && cidx < tab.width) ? 0.0 : -s;
    }
    std::vector<char> allowed(tab.width, 1);
    if (tab.run(allowed) != LpStatus::Optimal)
        throw std::logic_error("phase-1 objective is bounded by construction");
    if (-tab.t[m][tab.width] > kFeasEps) return {LpStatus::Infeasible, 0.0, {}};

    // Drive leftover artificials out of the basis; a row with no original
    // pivot is redundant and can stay (its artificial is stuck at zero).
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < n) continue;
        for (int cidx = 0; cidx < n; ++cidx) {
            if (std::abs(tab.t[r][cidx]) > kPivotEps) {
                tab.pivot(r, cidx);
                break;
            }
        }
    }

    // Phase 2 objective.
    for (int cidx = 0; cidx <= tab.width; ++cidx) {
        double red = (cidx < n) ? c[cidx] : 0.0;
        for (int r = 0; r < m; ++r)
            if (tab.basis[r] < n) red -= c[tab.basis[r]] * tab.t[r][cidx];
        tab.t[m][cidx] = red;
    }
    for (int cidx = n; cidx < tab.width; ++cidx) allowed[cidx] = 0;
    const LpStatus status = tab.run(allowed);
    if (status == LpStatus::Unbounded) return {LpStatus::Unbounded, 0.0, {}};

    LpResult res;
    res.status = LpStatus::Optimal;
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) res.x[tab.basis[r]] = tab.t[r][tab.width];
    res.value = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) res.value += c[cidx] * res.x[cidx];
    return res;
}

namespace {

// Row echelon over a copy; returns pivot rows of [A|b], or nullopt-like empty
// result with `inconsistent` set when 0 = nonzero appears.
struct Echelon {
    std::vector<std::vector<double>> rows;  // reduced independent rows of [A|b]
    bool inconsistent = false;
};

Echelon reduce(const std::vector<std::vector<double>>& A, const std::vector<double>& b) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(A.empty() ? 0 : A[0].size());
    std::vector<std::vector<double>> w(m, std::vector<double>(n + 1));
    for (int r = 0; r < m; ++r) {
        std::copy(A[r].begin(), A[r].end(), w[r].begin());
        w[r][n] = b[r];
    }
    Echelon out;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int best = -1;
        double mag = kPivotEps;
        for (int r = row; r < m; ++r) {
            if (std::abs(w[r][col]) > mag) {
                mag = std::abs(w[r][col]);
                best = r;
            }
        }
        if (best < 0) continue;
        std::swap(w[row], w[best]);
        for (int r = 0; r < m; ++r) {
            if (r == row || w[r][col] == 0.0) continue;
            const double f = w[r][col] / w[row][col];
            for (int cidx = col; cidx <= n; ++cidx) w[r][cidx] -= f * w[row][cidx];
        }
        ++row;
    }
    for (int r = row; r < m; ++r)
        if (std::abs(w[r][n]) > kFeasEps) out.inconsistent = true;
    w.resize(row);
    out.rows = std::move(w);
    return out;
}

// Solve the square system formed by the chosen columns; empty on singular.
std::vector<double> solve_square(const std::vector<std::vector<double>>& rows,
                                 const std::vector<int>& cols) {
    const int k = static_cast<int>(cols.size());
    const int n = static_cast<int>(rows[0].size()) - 1;
    std::vector<std::vector<double>> w(k, std::vector<double>(k + 1));
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) w[r][c] = rows[r][cols[c]];
        w[r][k] = rows[r][n];
    }
    for (int col = 0; col < k; ++col) {
        int best = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(w[r][col]) > std::abs(w[best][col])) best = r;
        if (std::abs(w[best][col]) < kPivotEps) return {};
        std::swap(w[col], w[best]);
        for (int r = 0; r < k; ++r) {
            if (r == col || w[r][col] == 0.0) continue;
            const double f = w[r][col] / w[col][col];
            for (int c = col; c <= k; ++c) w[r][c] -= f * w[col][c];
        }
    }
    std::vector<double> x(k);
    for (int r = 0; r < k; ++r) x[r] = w[r][k] / w[r][r];
    return x;
}

} // namespace

LpResult enumerate_vertices(const std::vector<std::vector<double>>& A,
                            const std::vector<double>& b,
                            const std::vector<double>& c,
                            std::size_t max_bases) {
    const int n = static_cast<int>(c.size());
    const Echelon ech = reduce(A, b);
    if (ech.inconsistent) return {LpStatus::Infeasible, 0.0, {}};
    const int rank = static_cast<int>(ech.rows.size());
    if (rank == 0) throw std::invalid_argument("enumerate_vertices: zero-rank system");

    // C(n, rank) guard.
    double combos = 1.0;
    for (int i = 0; i < rank; ++i) combos = combos * (n - i) / (i + 1);
    if (combos > static_cast<double>(max_bases))
        throw std::invalid_argument("enumerate_vertices: too many bases (" +
                                    std::to_string(static_cast<long long>(combos)) +
                                    ")");

    LpResult best;
    best.status = LpStatus::Infeasible;
    std::vector<int> cols(rank);
    for (int i = 0; i < rank; ++i) cols[i] = i;
    for (;;) {
        const std::vector<double> sol = solve_square(ech.rows, cols);
        if (!sol.empty()) {
            bool feasible = true;
            for (double v : sol) {
                if (v < -kFeasEps) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                std::vector<double> x(n, 0.0);
                for (int i = 0; i < rank; ++i) x[cols[i]] = std::max(0.0, sol[i]);
                // Verify against the original rows (guards echelon round-off).
                for (std::size_t r = 0; r < A.size() && feasible; ++r) {
                    double lhs = 0.0;
                    for (int j = 0; j < n; ++j) lhs += A[r][j] * x[j];
                    if (std::abs(lhs - b[r]) > 1e-6) feasible = false;
                }
                if (feasible) {
                    double value = 0.0;
                    for (int j = 0; j < n; ++j) value += c[j] * x[j];
                    if (best.status == LpStatus::Infeasible || value < best.value) {
                        best.status = LpStatus::Optimal;
                        best.value = value;
                        best.x = std::move(x);
                    }
                }
            }
        }
        // next combination
        int i = rank - 1;
        while (i >= 0 && cols[i] == n - rank + i) --i;
        if (i < 0) break;
        ++cols[i];
        for (int j = i + 1; j < rank; ++j) cols[j] = cols[j - 1] + 1;
    }
    return best;
}

} // namespace poc
