#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace poc {

struct NodeSpec {
    std::string name;
    int card = 2;
};

struct TheoremFlag {
    bool eligible = false;
    std::string justification;
};

// Which bound-sharpening results the declared covariate set qualifies for.
// thm2 implies thm1 (a back-door set cannot contain descendants of the
// treatment); classify_covariates maintains that invariant.
struct Eligibility {
    TheoremFlag thm1_nondescendant;
    TheoremFlag thm2_backdoor;
    TheoremFlag thm3_partial_mediator;
    TheoremFlag thm4_pure_mediator;
};

/**
 * A causal diagram: DAG over named finite-cardinality nodes plus a set of
 * latent-confounder edges (unordered pairs, rendered internally as virtual
 * fork nodes for separation queries). Treatment and outcome are distinguished
 * binary nodes. Construction validates the whole structure and throws
 * std::invalid_argument on any defect (cycle, unknown endpoint, self loop,
 * duplicate edge, non-binary treatment/outcome, cardinality < 2).
 */
class CausalDiagram {
public:
    CausalDiagram(std::vector<NodeSpec> nodes,
                  std::vector<std::pair<std::string, std::string>> edges,
                  std::vector<std::pair<std::string, std::string>> latents,
                  std::string treatment,
                  std::string outcome);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    bool has_node(const std::string& name) const;
    int index_of(const std::string& name) const;  // throws on unknown name
    const std::string& name_of(int v) const { return nodes_.at(v).name; }
    int cardinality(int v) const { return nodes_.at(v).card; }

    const std::string& treatment() const { return nodes_[treatment_].name; }
    const std::string& outcome() const { return nodes_[outcome_].name; }
    int treatment_index() const { return treatment_; }
    int outcome_index() const { return outcome_; }

    const std::vector<std::pair<int, int>>& directed_edges() const { return directed_; }
    const std::vector<std::pair<int, int>>& latent_edges() const { return latent_; }
    const std::vector<int>& parents(int v) const { return parents_.at(v); }
    const std::vector<int>& children(int v) const { return children_.at(v); }
    bool has_directed_edge(int from, int to) const;

    // Nodes in an order where every parent precedes its children.
    const std::vector<int>& topological_order() const { return topo_; }

    // Proper descendants (v itself excluded).
    std::set<std::string> descendants(const std::string& v) const;

    // Is every path between a and b blocked by c? Latent edges act as
    // unobserved forks. a and b must be nonempty; the three sets must be
    // pairwise disjoint and name known nodes.
    bool d_separated(const std::set<std::string>& a,
                     const std::set<std::string>& b,
                     const std::set<std::string>& c) const;

    // Back-door criterion for z relative to (treatment, outcome): no member
    // of z descends from the treatment, and z d-separates treatment from
    // outcome once the treatment's outgoing edges are removed.
    bool satisfies_backdoor(const std::set<std::string>& z) const;

    Eligibility classify_covariates(const std::set<std::string>& z) const;

private:
    std::vector<NodeSpec> nodes_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::pair<int, int>> directed_;
    std::vector<std::pair<int, int>> latent_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<int> topo_;
    int treatment_ = -1;
    int outcome_ = -1;

    std::vector<int> to_indices(const std::set<std::string>& names, const char* what) const;
    std::set<int> descendant_indices(int v) const;
    // Moral-graph separation over the latent-augmented DAG; optionally drops
    // the treatment's outgoing directed edges first (back-door test).
    bool moral_separated(const std::vector<int>& a,
                         const std::vector<int>& b,
                         const std::vector<int>& c,
                         bool drop_treatment_outgoing) const;
};

} // namespace poc
