#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poc {

// Neumaier-compensated accumulator. Stratified bounds sum many small
// products; this keeps them stable regardless of stratum count.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Variable {
    std::string name;
    int card = 2;
};

// Partial or full assignment of values to named variables.
using Assignment = std::vector<std::pair<std::string, int>>;

/**
 * Dense joint distribution over a list of finite variables. Cells are stored
 * row-major with the last variable fastest. Construction validates
 * normalization (sum within 1e-9 of 1 for probabilities; any positive total
 * for counts) and renormalizes, so downstream sums can rely on exact unit
 * mass up to float rounding.
 */
class ObservationalTable {
public:
    static ObservationalTable from_probabilities(std::vector<Variable> vars,
                                                 std::vector<double> cells);
    static ObservationalTable from_counts(std::vector<Variable> vars,
                                          std::vector<double> counts);

    const std::vector<Variable>& variables() const { return vars_; }
    bool has_variable(const std::string& name) const;
    int index_of(const std::string& name) const;  // throws on unknown name
    std::size_t cell_count() const { return cells_.size(); }
    double cell(std::size_t flat) const { return cells_.at(flat); }

    // Probability of the (possibly partial) assignment.
    double mass(const Assignment& a) const;

    // Joint over the named subset; variables keep their original relative
    // order regardless of the order of `keep`.
    ObservationalTable marginal(const std::vector<std::string>& keep) const;

    // Distribution of `target` given the assignment. Throws
    // UndefinedEstimandError when the conditioning event has zero mass.
    ObservationalTable conditional(const std::vector<std::string>& target,
                                   const Assignment& given) const;

private:
    ObservationalTable(std::vector<Variable> vars, std::vector<double> cells);

    std::vector<Variable> vars_;
    std::vector<double> cells_;
    std::vector<std::size_t> strides_;

    void decode(std::size_t flat, std::vector<int>& values) const;
};

// The four joint cells of a binary treatment/outcome pair. x means X=1,
// y means Y=1; primes are the complements.
struct ObsMarginals {
    double xy = 0.0;    // P(x, y)
    double xyp = 0.0;   // P(x, y')
    double xpy = 0.0;   // P(x', y)
    double xpyp = 0.0;  // P(x', y')

    double y() const { return xy + xpy; }
    double x() const { return xy + xyp; }

    static ObsMarginals from_table(const ObservationalTable& t,
                                   const std::string& x_name,
                                   const std::string& y_name);
    void validate() const;
};

struct ExperimentalStratum {
    std::string label;
    double p_z = 0.0;        // P(Z = z)
    double p_y_do_x = 0.0;   // P(y | do(x), z)
    double p_y_do_xp = 0.0;  // P(y | do(x'), z)
};

/**
 * Experimental (interventional) quantities: the two arm-level outcome rates,
 * optionally broken down by the strata of a covariate. validate() checks
 * ranges, that stratum weights sum to 1 within 1e-9, and that the strata mix
 * back to the aggregates within 1e-9 (law of total probability).
 */
struct ExperimentalTable {
    double p_y_do_x = 0.0;   // P(y | do(x))
    double p_y_do_xp = 0.0;  // P(y | do(x'))
    std::vector<ExperimentalStratum> strata;

    void validate() const;
};

/**
 * Mediator-path quantities for Theorems 3 and 4. Exactly one of the outcome
 * tables is present: p_y_given_z for the pure mediator (Fig. 3 shape),
 * p_y_given_zx for the partial mediator (Fig. 2 shape, indexed [z][x'] with
 * x' at 0 and x at 1).
 */
struct MediatorTables {
    std::optional<std::vector<double>> p_y_given_z;
    std::optional<std::vector<std::array<double, 2>>> p_y_given_zx;
    std::vector<double> p_z_do_x;   // P(Z = k | do(x))
    std::vector<double> p_z_do_xp;  // P(Z = k | do(x'))

    int z_card() const { return static_cast<int>(p_z_do_x.size()); }
    void validate() const;
};

// Cross-table coherence: P(x,y) <= P(y_x) <= P(x,y) + P(x') and the mirror
// for the x' arm, each within 1e-6. Returns human-readable violations.
std::vector<std::string> coherence_violations(const ExperimentalTable& exp,
                                              const ObsMarginals& obs);

// Throws IncoherentDataError listing every violation.
void require_coherent(const ExperimentalTable& exp, const ObsMarginals& obs);

/**
 * Back-door adjustment: reconstructs experimental quantities from a purely
 * observational table, P(y_x) = sum_z P(y|x,z) P(z). Strata rows are
 * populated with P(y_x|z) = P(y|x,z). The caller is responsible for z
 * actually satisfying the back-door criterion. Throws UndefinedEstimandError
 * when some positive-mass stratum never received one of the treatment arms.
 */
ExperimentalTable adjustment_formula(const ObservationalTable& t,
                                     const std::vector<std::string>& z,
                                     const std::string& x_name,
                                     const std::string& y_name);

} // namespace poc
