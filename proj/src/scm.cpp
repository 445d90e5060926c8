#include "pocbounds/scm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pocbounds/errors.hpp"
#include "pocbounds/linprog.hpp"
#include "pocbounds/rng.hpp"

namespace poc {

namespace {

constexpr std::size_t kMaxParentConfigs = 16;
constexpr std::size_t kMaxNodeTypes = std::size_t{1} << 30;
constexpr std::size_t kMaxJointTypes = std::size_t{1} << 22;
constexpr std::size_t kMaxLpTypes = std::size_t{1} << 14;
constexpr double kLawTol = 1e-12;

std::vector<int> sorted_parents(const CausalDiagram& g, int v) {
    std::vector<int> ps = g.parents(v);
    std::sort(ps.begin(), ps.end());
    return ps;
}

// Strides over the sorted parents, last parent fastest.
std::vector<std::size_t> config_strides(const CausalDiagram& g,
                                        const std::vector<int>& ps) {
    std::vector<std::size_t> st(ps.size());
    std::size_t acc = 1;
    for (int i = static_cast<int>(ps.size()) - 1; i >= 0; --i) {
        st[i] = acc;
        acc *= static_cast<std::size_t>(g.cardinality(ps[i]));
    }
    return st;
}

// Latent-edge connected components, ordered by smallest member; members
// ascend within each block.
std::vector<std::vector<int>> compute_blocks(const CausalDiagram& g) {
    const int n = g.node_count();
    std::vector<int> root(n);
    std::iota(root.begin(), root.end(), 0);
    const auto find = [&](int a) {
        while (root[a] != a) a = root[a] = root[root[a]];
        return a;
    };
    for (const auto& [a, b] : g.latent_edges()) root[find(a)] = find(b);
    std::map<int, std::vector<int>> comp;
    for (int v = 0; v < n; ++v) comp[find(v)].push_back(v);
    std::vector<std::vector<int>> blocks;
    blocks.reserve(comp.size());
    for (auto& [r, members] : comp) blocks.push_back(std::move(members));
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return blocks;
}

struct NodeTables {
    std::vector<std::vector<int>> ps;               // sorted parents
    std::vector<std::vector<std::size_t>> st;       // config strides
    std::vector<std::size_t> types;                 // response-type counts
    std::vector<std::vector<std::vector<std::uint8_t>>> resp;
};

NodeTables build_node_tables(const CausalDiagram& g) {
    const int n = g.node_count();
    NodeTables t;
    t.ps.resize(n);
    t.st.resize(n);
    t.types.resize(n);
    t.resp.resize(n);
    for (int v = 0; v < n; ++v) {
        t.ps[v] = sorted_parents(g, v);
        t.st[v] = config_strides(g, t.ps[v]);
        t.types[v] = response_type_count(g, g.name_of(v));
        const std::size_t cfgs = parent_config_count(g, g.name_of(v));
        const auto card = static_cast<std::size_t>(g.cardinality(v));
        t.resp[v].assign(t.types[v], std::vector<std::uint8_t>(cfgs));
        for (std::size_t ty = 0; ty < t.types[v]; ++ty) {
            std::size_t rest = ty;
            for (std::size_t c = 0; c < cfgs; ++c) {
                t.resp[v][ty][c] = static_cast<std::uint8_t>(rest % card);
                rest /= card;
            }
        }
    }
    return t;
}

} // namespace

std::size_t parent_config_count(const CausalDiagram& g, const std::string& node) {
    std::size_t n = 1;
    for (int p : g.parents(g.index_of(node)))
        n *= static_cast<std::size_t>(g.cardinality(p));
    return n;
}

std::size_t response_type_count(const CausalDiagram& g, const std::string& node) {
    const std::size_t cfgs = parent_config_count(g, node);
    if (cfgs > kMaxParentConfigs)
        throw std::invalid_argument(
            "node '" + node + "' has " + std::to_string(cfgs) +
            " parent configurations; the oracle supports at most " +
            std::to_string(kMaxParentConfigs));
    const auto card = static_cast<std::size_t>(g.cardinality(g.index_of(node)));
    std::size_t n = 1;
    for (std::size_t i = 0; i < cfgs; ++i) {
        if (n > kMaxNodeTypes / card)
            throw std::invalid_argument("response-type space of node '" + node +
                                        "' is too large to enumerate");
        n *= card;
    }
    return n;
}

int response_value(const CausalDiagram& g, const std::string& node,
                   std::size_t type, std::size_t parent_config) {
    if (parent_config >= parent_config_count(g, node))
        throw std::out_of_range("parent configuration out of range for '" + node + "'");
    if (type >= response_type_count(g, node))
        throw std::out_of_range("response type out of range for '" + node + "'");
    const auto card = static_cast<std::size_t>(g.cardinality(g.index_of(node)));
    for (std::size_t i = 0; i < parent_config; ++i) type /= card;
    return static_cast<int>(type % card);
}

ResponseFunctionScm::ResponseFunctionScm(CausalDiagram g,
                                         std::vector<std::vector<double>> block_laws)
    : g_(std::move(g)), laws_(std::move(block_laws)) {
    NodeTables nt = build_node_tables(g_);
    parents_sorted_ = std::move(nt.ps);
    parent_strides_ = std::move(nt.st);
    type_counts_ = std::move(nt.types);
    resp_ = std::move(nt.resp);

    blocks_ = compute_blocks(g_);
    if (laws_.size() != blocks_.size())
        throw std::invalid_argument("expected " + std::to_string(blocks_.size()) +
                                    " block laws, got " + std::to_string(laws_.size()));
    std::size_t joint = 1;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        std::size_t size = 1;
        for (int v : blocks_[b]) {
            if (size > kMaxJointTypes / type_counts_[v])
                throw std::invalid_argument(
                    "joint response-type space is too large to enumerate");
            size *= type_counts_[v];
        }
        if (joint > kMaxJointTypes / size)
            throw std::invalid_argument(
                "joint response-type space is too large to enumerate");
        joint *= size;
        if (laws_[b].size() != size)
            throw std::invalid_argument(
                "block law " + std::to_string(b) + " has " +
                std::to_string(laws_[b].size()) + " entries; expected " +
                std::to_string(size));
        KahanSum sum;
        for (double p : laws_[b]) {
            if (!std::isfinite(p) || p < 0.0)
                throw std::invalid_argument("block law entries must be finite and "
                                            "nonnegative");
            sum.add(p);
        }
        if (std::abs(sum.value() - 1.0) > kLawTol)
            throw std::invalid_argument("block law " + std::to_string(b) +
                                        " sums to " + std::to_string(sum.value()));
    }
}

ResponseFunctionScm ResponseFunctionScm::random(const CausalDiagram& g,
                                                std::uint64_t seed) {
    Rng rng = Rng::substream(seed, substream::kScmLaw, 0);
    std::vector<std::vector<double>> laws;
    for (const auto& members : compute_blocks(g)) {
        std::size_t size = 1;
        for (int v : members) {
            const std::size_t t = response_type_count(g, g.name_of(v));
            if (size > kMaxJointTypes / t)
                throw std::invalid_argument(
                    "joint response-type space is too large to enumerate");
            size *= t;
        }
        // Uniform draw from the simplex: normalized Exponential(1) variates.
        std::vector<double> law(size);
        KahanSum total;
        for (auto& p : law) {
            p = rng.exp1();
            total.add(p);
        }
        for (auto& p : law) p /= total.value();
        KahanSum check;
        for (double p : law) check.add(p);
        // The largest entry absorbs the normalization rounding residue.
        *std::max_element(law.begin(), law.end()) -= check.value() - 1.0;
        laws.push_back(std::move(law));
    }
    return ResponseFunctionScm(g, std::move(laws));
}

template <typename Visit>
void ResponseFunctionScm::for_each_joint_type(Visit&& visit) const {
    const std::size_t nb = blocks_.size();
    std::vector<std::size_t> bidx(nb, 0);
    std::vector<std::size_t> bsize(nb);
    for (std::size_t b = 0; b < nb; ++b) bsize[b] = laws_[b].size();
    std::vector<std::size_t> types(g_.node_count(), 0);
    for (;;) {
        double prob = 1.0;
        for (std::size_t b = 0; b < nb; ++b) prob *= laws_[b][bidx[b]];
        if (prob > 0.0) {
            for (std::size_t b = 0; b < nb; ++b) {
                const auto& members = blocks_[b];
                std::size_t rest = bidx[b];
                for (int i = static_cast<int>(members.size()) - 1; i >= 0; --i) {
                    const int v = members[i];
                    types[v] = rest % type_counts_[v];
                    rest /= type_counts_[v];
                }
            }
            visit(prob, types);
        }
        std::size_t b = nb;
        while (b > 0 && ++bidx[b - 1] == bsize[b - 1]) {
            bidx[b - 1] = 0;
            --b;
        }
        if (b == 0) break;
    }
}

void ResponseFunctionScm::eval_world(const std::vector<std::size_t>& types, int do_x,
                                     std::vector<int>& vals) const {
    const int xi = g_.treatment_index();
    for (int v : g_.topological_order()) {
        if (do_x >= 0 && v == xi) {
            vals[v] = do_x;
            continue;
        }
        const auto& ps = parents_sorted_[v];
        const auto& st = parent_strides_[v];
        std::size_t cfg = 0;
        for (std::size_t i = 0; i < ps.size(); ++i)
            cfg += st[i] * static_cast<std::size_t>(vals[ps[i]]);
        vals[v] = resp_[v][types[v]][cfg];
    }
}

void ResponseFunctionScm::for_each_unit(
    const std::function<void(double, const std::vector<std::size_t>&)>& f) const {
    for_each_joint_type(f);
}

TrueValues ResponseFunctionScm::true_values() const {
    const int xi = g_.treatment_index();
    const int yi = g_.outcome_index();
    const int n = g_.node_count();
    std::vector<int> fact(n), w1(n), w0(n);
    KahanSum pns, pn_num, pn_den, ps_num, ps_den;
    for_each_joint_type([&](double prob, const std::vector<std::size_t>& types) {
        eval_world(types, -1, fact);
        eval_world(types, 1, w1);
        eval_world(types, 0, w0);
        const bool y1 = w1[yi] == 1;
        const bool y0 = w0[yi] == 1;
        if (y1 && !y0) pns.add(prob);
        if (fact[xi] == 1 && fact[yi] == 1) {
            pn_den.add(prob);
            if (!y0) pn_num.add(prob);
        }
        if (fact[xi] == 0 && fact[yi] == 0) {
            ps_den.add(prob);
            if (y1) ps_num.add(prob);
        }
    });
    TrueValues out;
    out.pns = std::clamp(pns.value(), 0.0, 1.0);
    out.pn_defined = pn_den.value() > 0.0;
    if (out.pn_defined) out.pn = std::clamp(pn_num.value() / pn_den.value(), 0.0, 1.0);
    out.ps_defined = ps_den.value() > 0.0;
    if (out.ps_defined) out.ps = std::clamp(ps_num.value() / ps_den.value(), 0.0, 1.0);
    return out;
}

Observables ResponseFunctionScm::observables(
    const std::vector<std::string>& covariates) const {
    const int n = g_.node_count();
    const int xi = g_.treatment_index();
    const int yi = g_.outcome_index();

    std::set<std::string> zset;
    std::vector<int> zidx;
    for (const auto& name : covariates) {
        zidx.push_back(g_.index_of(name));
        if (!zset.insert(name).second)
            throw std::invalid_argument("duplicate covariate '" + name + "'");
        if (name == g_.treatment() || name == g_.outcome())
            throw std::invalid_argument(
                "covariates cannot include the treatment or the outcome");
    }

    // Observational joint over every node, row-major, last node fastest.
    std::vector<std::size_t> strides(n);
    std::size_t cells = 1;
    for (int v = n - 1; v >= 0; --v) {
        strides[v] = cells;
        cells *= static_cast<std::size_t>(g_.cardinality(v));
    }
    std::vector<Variable> vars;
    vars.reserve(n);
    for (int v = 0; v < n; ++v) vars.push_back({g_.name_of(v), g_.cardinality(v)});
    std::vector<KahanSum> joint(cells);

    // Covariate configurations: order as passed, last name fastest.
    std::size_t zcfgs = 1;
    std::vector<std::size_t> zstr(zidx.size());
    for (int i = static_cast<int>(zidx.size()) - 1; i >= 0; --i) {
        zstr[i] = zcfgs;
        zcfgs *= static_cast<std::size_t>(g_.cardinality(zidx[i]));
    }

    const std::set<std::string> desc = g_.descendants(g_.treatment());
    bool stratify = !covariates.empty();
    for (const auto& name : covariates)
        if (desc.count(name)) stratify = false;

    const Eligibility elig = g_.classify_covariates(zset);
    const bool part_med = elig.thm3_partial_mediator.eligible;
    const bool pure_med = elig.thm4_pure_mediator.eligible;

    KahanSum agg1, agg0;
    std::vector<KahanSum> pz, sn1, sn0;
    if (stratify) {
        pz.resize(zcfgs);
        sn1.resize(zcfgs);
        sn0.resize(zcfgs);
    }
    std::vector<KahanSum> mz1, mz0, fz, fzy;
    std::vector<std::array<KahanSum, 2>> fzx, fzxy;
    if (part_med) {
        mz1.resize(zcfgs);
        mz0.resize(zcfgs);
        fz.resize(zcfgs);
        fzy.resize(zcfgs);
        fzx.resize(zcfgs);
        fzxy.resize(zcfgs);
    }

    std::vector<int> fact(n), w1(n), w0(n);
    for_each_joint_type([&](double prob, const std::vector<std::size_t>& types) {
        eval_world(types, -1, fact);
        eval_world(types, 1, w1);
        eval_world(types, 0, w0);
        std::size_t cell = 0;
        for (int v = 0; v < n; ++v)
            cell += strides[v] * static_cast<std::size_t>(fact[v]);
        joint[cell].add(prob);
        if (w1[yi] == 1) agg1.add(prob);
        if (w0[yi] == 1) agg0.add(prob);
        if (!stratify && !part_med) return;
        std::size_t zc = 0;
        for (std::size_t i = 0; i < zidx.size(); ++i)
            zc += zstr[i] * static_cast<std::size_t>(fact[zidx[i]]);
        if (stratify) {
            // Covariates here are non-descendants of the treatment, so their
            // values agree across the three worlds.
            pz[zc].add(prob);
            if (w1[yi] == 1) sn1[zc].add(prob);
            if (w0[yi] == 1) sn0[zc].add(prob);
        }
        if (part_med) {
            fz[zc].add(prob);
            if (fact[yi] == 1) fzy[zc].add(prob);
            fzx[zc][fact[xi]].add(prob);
            if (fact[yi] == 1) fzxy[zc][fact[xi]].add(prob);
            std::size_t zc1 = 0, zc0 = 0;
            for (std::size_t i = 0; i < zidx.size(); ++i) {
                zc1 += zstr[i] * static_cast<std::size_t>(w1[zidx[i]]);
                zc0 += zstr[i] * static_cast<std::size_t>(w0[zidx[i]]);
            }
            mz1[zc1].add(prob);
            mz0[zc0].add(prob);
        }
    });

    std::vector<double> cellvals(cells);
    for (std::size_t i = 0; i < cells; ++i) cellvals[i] = joint[i].value();
    Observables out{ObservationalTable::from_probabilities(std::move(vars),
                                                           std::move(cellvals)),
                    ExperimentalTable{}, std::nullopt};
    out.experimental.p_y_do_x = std::clamp(agg1.value(), 0.0, 1.0);
    out.experimental.p_y_do_xp = std::clamp(agg0.value(), 0.0, 1.0);

    if (stratify) {
        std::vector<int> values(zidx.size());
        for (std::size_t cfg = 0; cfg < zcfgs; ++cfg) {
            const double w = pz[cfg].value();
            if (w == 0.0) continue;  // zero-probability strata are skipped
            std::size_t rest = cfg;
            for (int i = static_cast<int>(zidx.size()) - 1; i >= 0; --i) {
                const auto card = static_cast<std::size_t>(g_.cardinality(zidx[i]));
                values[i] = static_cast<int>(rest % card);
                rest /= card;
            }
            ExperimentalStratum s;
            for (std::size_t i = 0; i < zidx.size(); ++i) {
                if (i) s.label += ",";
                s.label += covariates[i] + "=" + std::to_string(values[i]);
            }
            s.p_z = w;
            s.p_y_do_x = std::clamp(sn1[cfg].value() / w, 0.0, 1.0);
            s.p_y_do_xp = std::clamp(sn0[cfg].value() / w, 0.0, 1.0);
            out.experimental.strata.push_back(std::move(s));
        }
    }
    out.experimental.validate();

    if (part_med) {
        MediatorTables med;
        med.p_z_do_x.resize(zcfgs);
        med.p_z_do_xp.resize(zcfgs);
        for (std::size_t m = 0; m < zcfgs; ++m) {
            med.p_z_do_x[m] = std::clamp(mz1[m].value(), 0.0, 1.0);
            med.p_z_do_xp[m] = std::clamp(mz0[m].value(), 0.0, 1.0);
        }
        if (pure_med) {
            std::vector<double> yz(zcfgs);
            for (std::size_t m = 0; m < zcfgs; ++m) {
                const double w = fz[m].value();
                if (w == 0.0)
                    throw UndefinedEstimandError(
                        "mediator configuration " + std::to_string(m) +
                        " has zero probability; P(y|z) is undefined");
                yz[m] = std::clamp(fzy[m].value() / w, 0.0, 1.0);
            }
            med.p_y_given_z = std::move(yz);
        } else {
            std::vector<std::array<double, 2>> yzx(zcfgs);
            for (std::size_t m = 0; m < zcfgs; ++m)
                for (int xv = 0; xv < 2; ++xv) {
                    const double w = fzx[m][xv].value();
                    if (w == 0.0)
                        throw UndefinedEstimandError(
                            "mediator configuration " + std::to_string(m) +
                            " never occurs with treatment arm " +
                            std::to_string(xv) + "; P(y|z,x) is undefined");
                    yzx[m][xv] = std::clamp(fzxy[m][xv].value() / w, 0.0, 1.0);
                }
            med.p_y_given_zx = std::move(yzx);
        }
        med.validate();
        out.mediator = std::move(med);
    }
    return out;
}

ExtremizeResult extremize_estimand(const CausalDiagram& g, const ExtremizeInputs& in,
                                   Estimand estimand, LpRoute route) {
    const int n = g.node_count();
    const int xi = g.treatment_index();
    const int yi = g.outcome_index();
    for (int v = 0; v < n; ++v)
        if (v != xi && v != yi && !g.parents(v).empty())
            throw std::invalid_argument(
                "extremize_estimand handles families where every node besides "
                "treatment and outcome is a root; '" +
                g.name_of(v) + "' has parents");
    if (!in.joint && !in.marginals && !in.experimental)
        throw std::invalid_argument("extremize_estimand needs at least one table");

    // Joint response types enumerated row-major, last node fastest. Any
    // dependence between the per-node types is allowed, which subsumes every
    // latent-edge pattern.
    const NodeTables nt = build_node_tables(g);
    std::vector<std::size_t> tstride(n);
    std::size_t N = 1;
    for (int v = n - 1; v >= 0; --v) {
        tstride[v] = N;
        if (N > kMaxLpTypes / nt.types[v])
            throw std::invalid_argument(
                "joint response-type space is too large for the linear program");
        N *= nt.types[v];
    }

    // Stratification order for experimental strata rows.
    std::vector<std::string> covs = in.covariates;
    if (covs.empty())
        for (int v = 0; v < n; ++v)
            if (v != xi && v != yi) covs.push_back(g.name_of(v));
    std::vector<int> zidx;
    std::set<std::string> zseen;
    for (const auto& name : covs) {
        zidx.push_back(g.index_of(name));
        if (name == g.treatment() || name == g.outcome() || !zseen.insert(name).second)
            throw std::invalid_argument("bad stratification covariate '" + name + "'");
    }
    std::size_t zcfgs = 1;
    std::vector<std::size_t> zstr(zidx.size());
    for (int i = static_cast<int>(zidx.size()) - 1; i >= 0; --i) {
        zstr[i] = zcfgs;
        zcfgs *= static_cast<std::size_t>(g.cardinality(zidx[i]));
    }

    const bool use_joint = in.joint.has_value();
    std::vector<std::size_t> table_stride;
    if (use_joint) {
        if (static_cast<int>(in.joint->variables().size()) != n)
            throw std::invalid_argument(
                "the observational joint must cover every diagram node");
        for (int v = 0; v < n; ++v) {
            if (!in.joint->has_variable(g.name_of(v)) ||
                in.joint->variables()[in.joint->index_of(g.name_of(v))].card !=
                    g.cardinality(v))
                throw std::invalid_argument("the observational joint and the diagram "
                                            "disagree about node '" +
                                            g.name_of(v) + "'");
        }
        const auto& tv = in.joint->variables();
        table_stride.assign(tv.size(), 1);
        for (int i = static_cast<int>(tv.size()) - 2; i >= 0; --i)
            table_stride[i] =
                table_stride[i + 1] * static_cast<std::size_t>(tv[i + 1].card);
    }
    if (in.marginals) in.marginals->validate();
    if (in.experimental) in.experimental->validate();

    // Per-type facts: factual world, both interventional outcomes, the obs
    // cell the factual world lands in, and the covariate configuration.
    std::vector<std::size_t> obs_cell(N), zcell(N);
    std::vector<std::uint8_t> fx(N), fy(N), y1(N), y0(N);
    {
        std::vector<std::size_t> types(n);
        std::vector<int> fact(n), w1(n), w0(n);
        const auto eval = [&](int do_x, std::vector<int>& vals) {
            for (int v : g.topological_order()) {
                if (do_x >= 0 && v == xi) {
                    vals[v] = do_x;
                    continue;
                }
                std::size_t cfg = 0;
                for (std::size_t i = 0; i < nt.ps[v].size(); ++i)
                    cfg += nt.st[v][i] * static_cast<std::size_t>(vals[nt.ps[v][i]]);
                vals[v] = nt.resp[v][types[v]][cfg];
            }
        };
        for (std::size_t J = 0; J < N; ++J) {
            for (int v = 0; v < n; ++v) types[v] = (J / tstride[v]) % nt.types[v];
            eval(-1, fact);
            eval(1, w1);
            eval(0, w0);
            fx[J] = static_cast<std::uint8_t>(fact[xi]);
            fy[J] = static_cast<std::uint8_t>(fact[yi]);
            y1[J] = static_cast<std::uint8_t>(w1[yi]);
            y0[J] = static_cast<std::uint8_t>(w0[yi]);
            if (use_joint) {
                std::size_t cell = 0;
                for (int v = 0; v < n; ++v)
                    cell += table_stride[in.joint->index_of(g.name_of(v))] *
                            static_cast<std::size_t>(fact[v]);
                obs_cell[J] = cell;
            }
            std::size_t zc = 0;
            for (std::size_t i = 0; i < zidx.size(); ++i)
                zc += zstr[i] * static_cast<std::size_t>(fact[zidx[i]]);
            zcell[J] = zc;
        }
    }

    std::vector<std::vector<double>> A;
    std::vector<double> b;
    const auto add_row = [&](double rhs) -> std::vector<double>& {
        A.emplace_back(N, 0.0);
        b.push_back(rhs);
        return A.back();
    };

    if (use_joint) {
        const std::size_t base = A.size();
        for (std::size_t r = 0; r < in.joint->cell_count(); ++r)
            add_row(in.joint->cell(r));
        for (std::size_t J = 0; J < N; ++J) A[base + obs_cell[J]][J] = 1.0;
    } else if (in.marginals) {
        const double rhs[4] = {in.marginals->xy, in.marginals->xyp,
                               in.marginals->xpy, in.marginals->xpyp};
        const std::size_t base = A.size();
        for (double v : rhs) add_row(v);
        for (std::size_t J = 0; J < N; ++J) {
            const std::size_t r = fx[J] ? (fy[J] ? 0 : 1) : (fy[J] ? 2 : 3);
            A[base + r][J] = 1.0;
        }
    }

    if (in.experimental) {
        auto& row1 = add_row(in.experimental->p_y_do_x);
        for (std::size_t J = 0; J < N; ++J) row1[J] = y1[J] ? 1.0 : 0.0;
        auto& row0 = add_row(in.experimental->p_y_do_xp);
        for (std::size_t J = 0; J < N; ++J) row0[J] = y0[J] ? 1.0 : 0.0;
        if (!in.experimental->strata.empty()) {
            if (in.experimental->strata.size() != zcfgs)
                throw std::invalid_argument(
                    "experimental strata do not line up with the covariate "
                    "configurations (" +
                    std::to_string(in.experimental->strata.size()) + " vs " +
                    std::to_string(zcfgs) + ")");
            for (std::size_t cfg = 0; cfg < zcfgs; ++cfg) {
                const auto& s = in.experimental->strata[cfg];
                const std::size_t base = A.size();
                add_row(s.p_z);
                add_row(s.p_z * s.p_y_do_x);
                add_row(s.p_z * s.p_y_do_xp);
                for (std::size_t J = 0; J < N; ++J) {
                    if (zcell[J] != cfg) continue;
                    A[base][J] = 1.0;
                    if (y1[J]) A[base + 1][J] = 1.0;
                    if (y0[J]) A[base + 2][J] = 1.0;
                }
            }
        }
    }

    auto& norm = add_row(1.0);
    std::fill(norm.begin(), norm.end(), 1.0);

    double den = 1.0;
    std::vector<double> c(N, 0.0);
    if (estimand == Estimand::PNS) {
        for (std::size_t J = 0; J < N; ++J)
            if (y1[J] && !y0[J]) c[J] = 1.0;
    } else {
        double pxy = 0.0, pxpyp = 0.0;
        if (use_joint) {
            pxy = in.joint->mass({{g.treatment(), 1}, {g.outcome(), 1}});
            pxpyp = in.joint->mass({{g.treatment(), 0}, {g.outcome(), 0}});
        } else if (in.marginals) {
            pxy = in.marginals->xy;
            pxpyp = in.marginals->xpyp;
        } else {
            throw std::invalid_argument(to_string(estimand) +
                                        " extremization needs observational cells");
        }
        if (estimand == Estimand::PN) {
            if (!(pxy > 0.0))
                throw UndefinedEstimandError("P(x,y) = 0; pn is undefined");
            den = pxy;
            for (std::size_t J = 0; J < N; ++J)
                if (fx[J] && fy[J] && !y0[J]) c[J] = 1.0;
        } else {
            if (!(pxpyp > 0.0))
                throw UndefinedEstimandError("P(x',y') = 0; ps is undefined");
            den = pxpyp;
            for (std::size_t J = 0; J < N; ++J)
                if (!fx[J] && !fy[J] && y1[J]) c[J] = 1.0;
        }
    }

    const auto run = [&](const std::vector<double>& obj) {
        const LpResult r = route == LpRoute::Simplex ? solve_lp(A, b, obj)
                                                     : enumerate_vertices(A, b, obj);
        if (r.status == LpStatus::Infeasible)
            throw InfeasibleError(
                "no response-function law reproduces the supplied tables");
        if (r.status != LpStatus::Optimal)
            throw std::logic_error("estimand extremization should be bounded");
        return r.value;
    };
    std::vector<double> neg(N);
    for (std::size_t J = 0; J < N; ++J) neg[J] = -c[J];

    ExtremizeResult out;
    out.lower = std::clamp(run(c) / den, 0.0, 1.0);
    out.upper = std::clamp(-run(neg) / den, 0.0, 1.0);
    if (out.lower > out.upper) out.lower = out.upper;
    return out;
}

} // namespace poc
