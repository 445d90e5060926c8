#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pocbounds/graph.hpp"
#include "pocbounds/tables.hpp"

namespace poc {

enum class Estimand { PNS, PN, PS };
enum class Method { Auto, TianPearl, Conditional, Thm1, Thm2, Thm3, Thm4 };

std::string to_string(Estimand e);
std::string to_string(Method m);
Estimand estimand_from_string(const std::string& s);
Method method_from_string(const std::string& s);

/**
 * Closed interval in [0, 1] with the name of the binding formula argument at
 * each end (first argument achieving the extreme, in the order the theorem
 * lists them). make_interval clips tiny excursions outside [0, 1] and throws
 * IncoherentDataError when lower exceeds upper by more than 1e-9.
 *
 * Label vocabulary:
 *   PNS lower  : Zero, ExpDiff, ObsLowerY, ObsUpperY
 *   PNS upper  : ExpYx, ExpYprimeXprime, ObsJoint, ExpDiffPlusObs
 *   PN/PS      : Zero / ObsExcess (lower), One / ExpShortfall (upper)
 *   stratified : StratifiedSum (thm1), BackdoorSum (thm2),
 *                MediatorPairSum (thm3/thm4 upper when it binds)
 */
struct BoundInterval {
    double lower = 0.0;
    double upper = 1.0;
    std::string binding_lower;
    std::string binding_upper;

    double width() const { return upper - lower; }
    bool contains(double v, double tol = 0.0) const {
        return v >= lower - tol && v <= upper + tol;
    }
};

BoundInterval make_interval(double lower, std::string binding_lower, double upper,
                            std::string binding_upper);

// Tian-Pearl bounds on PNS. Observational marginals are optional; when
// present they must cohere with the experimental rates (checked) and the
// joint-term arguments sharpen both ends.
BoundInterval pns_tian_pearl(const ExperimentalTable& exp,
                             const std::optional<ObsMarginals>& obs);

// Tian-Pearl bounds on PN and PS. Both need observational data; PS is PN
// under the relabeling x <-> x', y <-> y'. Throws UndefinedEstimandError when
// the conditioning joint cell is zero.
BoundInterval pn_tian_pearl(const ExperimentalTable& exp, const ObsMarginals& obs);
BoundInterval ps_tian_pearl(const ExperimentalTable& exp, const ObsMarginals& obs);

// z-specific bounds from one stratum's quantities alone (the subpopulation
// analogue of the above; answers a different query than the population PNS).
BoundInterval pns_conditional(const ExperimentalStratum& s,
                              const std::optional<ObsMarginals>& obs_z);
BoundInterval pn_conditional(const ExperimentalStratum& s, const ObsMarginals& obs_z);
BoundInterval ps_conditional(const ExperimentalStratum& s, const ObsMarginals& obs_z);

// One stratum of a non-descendant covariate: experimental rates within the
// stratum, optionally the stratum's observational (x, y) cells.
struct ThmStratum {
    std::string label;
    double p_z = 0.0;
    double p_y_do_x = 0.0;
    double p_y_do_xp = 0.0;
    std::optional<ObsMarginals> obs;
};

// Theorem 1: weights must sum to 1 within 1e-9. Each stratum contributes its
// Tian-Pearl extreme, weighted by P(z).
BoundInterval pns_thm1(const std::vector<ThmStratum>& strata);

// Theorem 2: purely observational back-door bound. The caller vouches for z
// satisfying the back-door criterion in the diagram.
BoundInterval pns_thm2(const ObservationalTable& t, const std::vector<std::string>& z,
                       const std::string& x_name, const std::string& y_name);

// Theorems 3/4: mediator-sharpened upper bounds on top of the Tian-Pearl
// arguments. Thm3 needs P(y|z,x) (partial mediator), thm4 needs P(y|z) (pure
// mediator).
BoundInterval pns_thm3(const ExperimentalTable& exp,
                       const std::optional<ObsMarginals>& obs,
                       const MediatorTables& med);
BoundInterval pns_thm4(const ExperimentalTable& exp,
                       const std::optional<ObsMarginals>& obs,
                       const MediatorTables& med);

/**
 * A full problem instance: the diagram, whichever data tables exist, and the
 * declared covariate set (order fixes the stratum enumeration when strata are
 * derived from the observational table).
 */
struct Problem {
    CausalDiagram diagram;
    std::optional<ObservationalTable> observational;
    std::optional<ExperimentalTable> experimental;
    std::optional<MediatorTables> mediator;
    std::vector<std::string> covariates;
};

struct Query {
    Estimand estimand = Estimand::PNS;
    Method method = Method::Auto;
    std::optional<std::string> stratum;  // label, Method::Conditional only
};

struct MethodResult {
    Method method;
    BoundInterval interval;
};

struct ComputeResult {
    Estimand estimand = Estimand::PNS;
    Method method = Method::Auto;
    BoundInterval interval;
    // Methods whose bound is binding at each end (auto intersection).
    Method method_lower = Method::Auto;
    Method method_upper = Method::Auto;
    Eligibility eligibility;
    std::vector<MethodResult> evaluated;
    // True when experimental rates were reconstructed (back-door adjustment
    // or mediator chaining) rather than supplied.
    bool experimental_derived = false;
};

/**
 * Dispatch: checks eligibility of the requested method against the diagram,
 * derives experimental quantities when they are identifiable from what was
 * supplied (back-door adjustment; mediator chaining on the pure-mediator
 * shape), evaluates the method -- or, for Auto, intersects every eligible
 * population-level method. Throws IneligibleMethodError with the graph
 * justification when the request cannot be honored.
 */
ComputeResult compute(const Problem& p, const Query& q);

} // namespace poc
