#include "pocbounds/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace poc {

namespace {

std::pair<int, int> ordered(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

} // namespace

CausalDiagram::CausalDiagram(std::vector<NodeSpec> nodes,
                             std::vector<std::pair<std::string, std::string>> edges,
                             std::vector<std::pair<std::string, std::string>> latents,
                             std::string treatment,
                             std::string outcome)
    : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("diagram has no nodes");
    for (int i = 0; i < node_count(); ++i) {
        const auto& n = nodes_[i];
        if (n.name.empty()) throw std::invalid_argument("empty node name");
        if (n.card < 2)
            throw std::invalid_argument("node '" + n.name + "' has cardinality " +
                                        std::to_string(n.card) + " (need >= 2)");
        if (!index_.emplace(n.name, i).second)
            throw std::invalid_argument("duplicate node name '" + n.name + "'");
    }

    parents_.resize(nodes_.size());
    children_.resize(nodes_.size());
    for (const auto& [from, to] : edges) {
        const int u = index_of(from);
        const int v = index_of(to);
        if (u == v) throw std::invalid_argument("self loop on '" + from + "'");
        if (has_directed_edge(u, v))
            throw std::invalid_argument("duplicate edge " + from + " -> " + to);
        directed_.emplace_back(u, v);
        parents_[v].push_back(u);
        children_[u].push_back(v);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());

    for (const auto& [a, b] : latents) {
        const auto e = ordered(index_of(a), index_of(b));
        if (e.first == e.second)
            throw std::invalid_argument("latent self loop on '" + a + "'");
        if (std::find(latent_.begin(), latent_.end(), e) != latent_.end())
            throw std::invalid_argument("duplicate latent edge " + a + " -- " + b);
        latent_.push_back(e);
    }

    treatment_ = index_of(treatment);
    outcome_ = index_of(outcome);
    if (treatment_ == outcome_)
        throw std::invalid_argument("treatment and outcome must be distinct");
    if (nodes_[treatment_].card != 2 || nodes_[outcome_].card != 2)
        throw std::invalid_argument("treatment and outcome must be binary");

    // Kahn's algorithm; smallest index first for a deterministic order.
    std::vector<int> indeg(nodes_.size());
    for (int v = 0; v < node_count(); ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::set<int> ready;
    for (int v = 0; v < node_count(); ++v)
        if (indeg[v] == 0) ready.insert(v);
    while (!ready.empty()) {
        const int v = *ready.begin();
        ready.erase(ready.begin());
        topo_.push_back(v);
        for (int c : children_[v])
            if (--indeg[c] == 0) ready.insert(c);
    }
    if (topo_.size() != nodes_.size())
        throw std::invalid_argument("diagram contains a directed cycle");
}

bool CausalDiagram::has_node(const std::string& name) const {
    return index_.count(name) != 0;
}

int CausalDiagram::index_of(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end())
        throw std::invalid_argument("unknown node '" + name + "'");
    return it->second;
}

bool CausalDiagram::has_directed_edge(int from, int to) const {
    return std::find(directed_.begin(), directed_.end(), std::make_pair(from, to)) !=
           directed_.end();
}

std::set<int> CausalDiagram::descendant_indices(int v) const {
    std::set<int> seen;
    std::deque<int> queue{v};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int c : children_[u])
            if (seen.insert(c).second) queue.push_back(c);
    }
    return seen;
}

std::set<std::string> CausalDiagram::descendants(const std::string& v) const {
    std::set<std::string> out;
    for (int d : descendant_indices(index_of(v))) out.insert(nodes_[d].name);
    return out;
}

std::vector<int> CausalDiagram::to_indices(const std::set<std::string>& names,
                                           const char* what) const {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(index_of(n));
    (void)what;
    return out;
}

bool CausalDiagram::moral_separated(const std::vector<int>& a,
                                    const std::vector<int>& b,
                                    const std::vector<int>& c,
                                    bool drop_treatment_outgoing) const {
    // Augment with one virtual fork node per latent edge, then run the
    // ancestral-moral-graph reachability test (Lauritzen et al.).
    const int n = node_count();
    const int total = n + static_cast<int>(latent_.size());
    std::vector<std::vector<int>> parents(total);
    for (const auto& [u, v] : directed_) {
        if (drop_treatment_outgoing && u == treatment_) continue;
        parents[v].push_back(u);
    }
    for (int k = 0; k < static_cast<int>(latent_.size()); ++k) {
        parents[latent_[k].first].push_back(n + k);
        parents[latent_[k].second].push_back(n + k);
    }

    // Relevant = a, b, c and all their ancestors in the augmented DAG.
    std::vector<char> relevant(total, 0);
    std::deque<int> queue;
    const auto mark = [&](int v) {
        if (!relevant[v]) {
            relevant[v] = 1;
            queue.push_back(v);
        }
    };
    for (int v : a) mark(v);
    for (int v : b) mark(v);
    for (int v : c) mark(v);
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : parents[v]) mark(p);
    }

    // Moralize the induced subgraph: parent-child links plus marriages
    // between co-parents of any relevant node.
    std::vector<std::set<int>> adj(total);
    const auto connect = [&](int u, int v) {
        adj[u].insert(v);
        adj[v].insert(u);
    };
    for (int v = 0; v < total; ++v) {
        if (!relevant[v]) continue;
        const auto& ps = parents[v];
        for (size_t i = 0; i < ps.size(); ++i) {
            if (!relevant[ps[i]]) continue;
            connect(ps[i], v);
            for (size_t j = i + 1; j < ps.size(); ++j)
                if (relevant[ps[j]]) connect(ps[i], ps[j]);
        }
    }

    std::vector<char> blocked(total, 0);
    for (int v : c) blocked[v] = 1;
    std::vector<char> reached(total, 0);
    for (int v : a) {
        if (!blocked[v]) {
            reached[v] = 1;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : adj[v]) {
            if (blocked[u] || reached[u]) continue;
            reached[u] = 1;
            queue.push_back(u);
        }
    }
    for (int v : b)
        if (reached[v]) return false;
    return true;
}

bool CausalDiagram::d_separated(const std::set<std::string>& a,
                                const std::set<std::string>& b,
                                const std::set<std::string>& c) const {
    if (a.empty() || b.empty())
        throw std::invalid_argument("d_separated: a and b must be nonempty");
    for (const auto& n : a)
        if (b.count(n) || c.count(n))
            throw std::invalid_argument("d_separated: sets overlap at '" + n + "'");
    for (const auto& n : b)
        if (c.count(n))
            throw std::invalid_argument("d_separated: sets overlap at '" + n + "'");
    return moral_separated(to_indices(a, "a"), to_indices(b, "b"), to_indices(c, "c"),
                           /*drop_treatment_outgoing=*/false);
}

bool CausalDiagram::satisfies_backdoor(const std::set<std::string>& z) const {
    if (z.count(treatment()) || z.count(outcome()))
        throw std::invalid_argument("back-door set must exclude treatment and outcome");
    const auto desc = descendant_indices(treatment_);
    for (const auto& n : z)
        if (desc.count(index_of(n))) return false;
    return moral_separated({treatment_}, {outcome_}, to_indices(z, "z"),
                           /*drop_treatment_outgoing=*/true);
}

Eligibility CausalDiagram::classify_covariates(const std::set<std::string>& z) const {
    if (z.count(treatment()) || z.count(outcome()))
        throw std::invalid_argument("covariate set must exclude treatment and outcome");
    for (const auto& n : z) index_of(n);

    Eligibility e;
    if (z.empty()) {
        const std::string why = "no covariates declared";
        e.thm1_nondescendant = {false, why};
        e.thm2_backdoor = {false, why};
        e.thm3_partial_mediator = {false, why};
        e.thm4_pure_mediator = {false, why};
        return e;
    }

    const auto x_desc = descendant_indices(treatment_);

    // Theorem 1: every covariate is a non-descendant of the treatment.
    e.thm1_nondescendant = {true, "no covariate descends from " + treatment()};
    for (const auto& n : z) {
        if (x_desc.count(index_of(n))) {
            e.thm1_nondescendant = {false, n + " is a descendant of " + treatment()};
            break;
        }
    }

    if (satisfies_backdoor(z)) {
        e.thm2_backdoor = {true, "covariates satisfy the back-door criterion"};
    } else {
        e.thm2_backdoor = {false,
                           e.thm1_nondescendant.eligible
                               ? "covariates fail the back-door criterion"
                               : e.thm1_nondescendant.justification};
    }
    // A back-door set contains no treatment descendants, so thm2 => thm1.
    if (e.thm2_backdoor.eligible && !e.thm1_nondescendant.eligible)
        throw std::logic_error("back-door set classified as treatment-descendant");

    // Theorems 3/4: z is exactly a mediator block in the Fig. 2 / Fig. 3
    // sense. Conservative structural test; anything beyond those shapes is
    // refused.
    std::set<int> zi;
    for (const auto& n : z) zi.insert(index_of(n));
    std::string why;
    bool mediator = true;
    for (int m : zi) {
        if (!x_desc.count(m)) {
            mediator = false;
            why = nodes_[m].name + " is not a descendant of " + treatment();
            break;
        }
        if (!descendant_indices(m).count(outcome_)) {
            mediator = false;
            why = outcome() + " does not descend from " + nodes_[m].name;
            break;
        }
        for (int p : parents_[m]) {
            if (p != treatment_ && !zi.count(p)) {
                mediator = false;
                why = nodes_[m].name + " has parent " + nodes_[p].name +
                      " outside the mediator set";
                break;
            }
        }
        if (!mediator) break;
    }
    if (mediator) {
        for (int p : parents_[outcome_]) {
            if (p != treatment_ && !zi.count(p)) {
                mediator = false;
                why = outcome() + " has parent " + nodes_[p].name +
                      " outside the mediator set";
                break;
            }
        }
    }
    if (mediator) {
        for (const auto& [u, v] : latent_) {
            const bool x_to_mediator = (u == treatment_ && zi.count(v)) ||
                                       (v == treatment_ && zi.count(u));
            if (!x_to_mediator) {
                mediator = false;
                why = "latent edge " + nodes_[u].name + " -- " + nodes_[v].name +
                      " is not between " + treatment() + " and a mediator";
                break;
            }
        }
    }

    if (mediator) {
        e.thm3_partial_mediator = {true, "covariates mediate every " + treatment() +
                                             " -> " + outcome() + " path"};
        if (has_directed_edge(treatment_, outcome_)) {
            e.thm4_pure_mediator = {false, "direct edge " + treatment() + " -> " +
                                               outcome() + " present"};
        } else {
            e.thm4_pure_mediator = {true, "all " + treatment() + " -> " + outcome() +
                                              " influence passes through the mediators"};
        }
    } else {
        e.thm3_partial_mediator = {false, why};
        e.thm4_pure_mediator = {false, why};
    }
    return e;
}

} // namespace poc
