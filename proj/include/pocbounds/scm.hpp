#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pocbounds/bounds.hpp"
#include "pocbounds/graph.hpp"
#include "pocbounds/tables.hpp"

namespace poc {

// Number of parent configurations a node's response function ranges over
// (product of parent cardinalities; 1 for a root). Parents are taken in
// ascending node-index order and configurations enumerate row-major with the
// last parent fastest, matching the table conventions.
std::size_t parent_config_count(const CausalDiagram& g, const std::string& node);

// card(node) ^ parent_config_count: the size of the node's response-type
// space. Throws std::invalid_argument beyond 16 parent configurations.
std::size_t response_type_count(const CausalDiagram& g, const std::string& node);

// Value that response type `type` assigns under `parent_config`: digit
// `parent_config` of `type` written in base card(node), least significant
// digit first.
int response_value(const CausalDiagram& g, const std::string& node,
                   std::size_t type, std::size_t parent_config);

struct TrueValues {
    double pns = 0.0;
    double pn = 0.0;  // meaningful only when pn_defined
    double ps = 0.0;  // meaningful only when ps_defined
    bool pn_defined = false;  // P(x, y) > 0
    bool ps_defined = false;  // P(x', y') > 0
};

struct Observables {
    ObservationalTable joint;  // over every diagram node, in node order
    ExperimentalTable experimental;
    std::optional<MediatorTables> mediator;
};

/**
 * Brute-force structural causal model in response-function form. Each node
 * carries a response type (a map from parent configurations to a value); the
 * exogenous law is a dense joint distribution over the type spaces of each
 * latent-edge connected component ("block"), with blocks independent of one
 * another. Everything downstream - counterfactuals, observables, mediator
 * tables - is computed by exact enumeration of the joint type space, so this
 * class is the ground truth the bound formulas are tested against.
 *
 * Blocks are ordered by their smallest node index; members within a block
 * are sorted ascending and a block's law is indexed row-major over member
 * types with the last member fastest. Laws must be nonnegative and sum to 1
 * within 1e-12.
 */
class ResponseFunctionScm {
public:
    ResponseFunctionScm(CausalDiagram g, std::vector<std::vector<double>> block_laws);

    // Exogenous law drawn uniformly from the probability simplex of each
    // block (normalized Exponential(1) draws), deterministic in the seed.
    static ResponseFunctionScm random(const CausalDiagram& g, std::uint64_t seed);

    const CausalDiagram& diagram() const { return g_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<std::vector<double>>& block_laws() const { return laws_; }

    // Exact PNS / PN / PS by joint-type enumeration.
    TrueValues true_values() const;

    // Visit every positive-probability exogenous state (joint response type)
    // as f(probability, types). Together with eval_world this supports
    // arbitrary counterfactual queries against the oracle.
    void for_each_unit(
        const std::function<void(double, const std::vector<std::size_t>&)>& f) const;

    // Values of every node under the given types, with do(treatment = do_x)
    // when do_x is 0/1 and no intervention when do_x is -1. vals must have
    // node_count entries.
    void eval_world(const std::vector<std::size_t>& types, int do_x,
                    std::vector<int>& vals) const;

    /**
     * The tables an investigator could record on this model:
     *  - the observational joint over all nodes;
     *  - experimental rates, with per-stratum rows when every requested
     *    covariate is a non-descendant of the treatment (zero-probability
     *    strata are skipped);
     *  - mediator tables when the covariates classify as a (partial or pure)
     *    mediator set: P(z | do(x)) arrays plus P(y|z) on the pure shape and
     *    P(y|z,x) otherwise. Zero-mass conditioning events raise
     *    UndefinedEstimandError.
     */
    Observables observables(const std::vector<std::string>& covariates = {}) const;

private:
    CausalDiagram g_;
    std::vector<std::vector<int>> blocks_;
    std::vector<std::vector<double>> laws_;
    std::vector<std::vector<int>> parents_sorted_;
    std::vector<std::vector<std::size_t>> parent_strides_;
    std::vector<std::size_t> type_counts_;
    // resp_[v][type][parent_config] -> value of node v
    std::vector<std::vector<std::vector<std::uint8_t>>> resp_;

    // Walk every joint response type, calling visit(probability, types).
    template <typename Visit>
    void for_each_joint_type(Visit&& visit) const;
};

enum class LpRoute { Simplex, Enumerate };

struct ExtremizeInputs {
    // Exactly one of joint / marginals may be set (joint wins when both are).
    std::optional<ObservationalTable> joint;  // over every diagram node
    std::optional<ObsMarginals> marginals;    // treatment/outcome cells only
    std::optional<ExperimentalTable> experimental;
    // Stratification order behind experimental->strata: stratum i is
    // covariate configuration i, row-major with the last name fastest.
    // Defaults to every non-treatment, non-outcome node in diagram order;
    // the configuration count must equal the stratum count.
    std::vector<std::string> covariates;
};

struct ExtremizeResult {
    double lower = 0.0;
    double upper = 1.0;
};

/**
 * Sharpest conceivable bounds: minimize and maximize the estimand over every
 * joint response-type law reproducing the supplied tables, as a linear
 * program. Supported families keep every node other than treatment and
 * outcome a root (arbitrary dependence between all response types is
 * allowed, so latent edges need no special handling); graphs with mediators
 * are refused with std::invalid_argument. Route Simplex runs a two-phase
 * simplex; Route Enumerate checks every basic feasible solution and is only
 * viable for small instances. Throws InfeasibleError when no law matches the
 * tables.
 */
ExtremizeResult extremize_estimand(const CausalDiagram& g, const ExtremizeInputs& in,
                                   Estimand estimand, LpRoute route = LpRoute::Simplex);

} // namespace poc
