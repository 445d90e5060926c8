#include "pocbounds/sim.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "pocbounds/errors.hpp"

namespace poc {

namespace {

constexpr std::size_t kMaxConfigs = std::size_t{1} << 22;

std::vector<int> sorted_parents(const CausalDiagram& g, int v) {
    std::vector<int> ps = g.parents(v);
    std::sort(ps.begin(), ps.end());
    return ps;
}

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

// Full-joint cell strides over all nodes, last node fastest.
std::vector<std::size_t> cell_strides(const CausalDiagram& g, std::size_t& cells) {
    const int n = g.node_count();
    std::vector<std::size_t> stride(n);
    cells = 1;
    for (int v = n - 1; v >= 0; --v) {
        stride[v] = cells;
        const auto card = static_cast<std::size_t>(g.cardinality(v));
        if (cells > kMaxConfigs / card)
            throw std::invalid_argument("configuration space too large to simulate");
        cells *= card;
    }
    return stride;
}

} // namespace

CptSet generate_cpts(const CausalDiagram& g, Rng& rng) {
    const int n = g.node_count();
    CptSet out;
    out.rows.resize(n);
    for (int v = 0; v < n; ++v) {
        std::size_t cfgs = 1;
        for (int p : g.parents(v)) cfgs *= static_cast<std::size_t>(g.cardinality(p));
        out.rows[v].assign(cfgs, std::vector<double>(g.cardinality(v)));
        for (auto& row : out.rows[v]) {
            double total = 0.0;
            for (auto& p : row) {
                p = rng.exp1();
                total += p;
            }
            for (auto& p : row) p /= total;
        }
    }
    return out;
}

ObservationalTable joint_from_cpts(const CausalDiagram& g, const CptSet& cpts) {
    const int n = g.node_count();
    if (static_cast<int>(cpts.rows.size()) != n)
        throw std::invalid_argument("CPT set does not match the diagram");
    std::size_t cells = 0;
    const std::vector<std::size_t> stride = cell_strides(g, cells);
    std::vector<std::vector<int>> ps(n);
    std::vector<std::vector<std::size_t>> st(n);
    for (int v = 0; v < n; ++v) {
        ps[v] = sorted_parents(g, v);
        st[v] = config_strides(g, ps[v]);
    }
    std::vector<double> probs(cells);
    std::vector<int> vals(n);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        for (int v = 0; v < n; ++v)
            vals[v] = static_cast<int>(cell / stride[v] %
                                       static_cast<std::size_t>(g.cardinality(v)));
        double p = 1.0;
        for (int v = 0; v < n; ++v) {
            std::size_t cfg = 0;
            for (std::size_t i = 0; i < ps[v].size(); ++i)
                cfg += st[v][i] * static_cast<std::size_t>(vals[ps[v][i]]);
            p *= cpts.rows[v].at(cfg).at(static_cast<std::size_t>(vals[v]));
        }
        probs[cell] = p;
    }
    std::vector<Variable> vars;
    vars.reserve(n);
    for (int v = 0; v < n; ++v) vars.push_back({g.name_of(v), g.cardinality(v)});
    return ObservationalTable::from_probabilities(std::move(vars), std::move(probs));
}

std::vector<SimRecord> run_simulation(const CausalDiagram& g,
                                      const std::vector<std::string>& covariates,
                                      std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulation needs at least one sample");
    std::set<std::string> zset;
    for (const auto& name : covariates)
        if (!zset.insert(name).second)
            throw std::invalid_argument("duplicate covariate '" + name + "'");
    const Eligibility elig = g.classify_covariates(zset);
    if (!elig.thm2_backdoor.eligible)
        throw std::invalid_argument("simulation covariates must form a back-door "
                                    "set: " +
                                    elig.thm2_backdoor.justification);

    const int nn = g.node_count();
    const int xi = g.treatment_index();
    const int yi = g.outcome_index();
    std::size_t cells = 0;
    const std::vector<std::size_t> stride = cell_strides(g, cells);
    std::vector<std::vector<int>> ps(nn);
    std::vector<std::vector<std::size_t>> pst(nn);
    std::vector<std::size_t> cfg_counts(nn), cards(nn);
    for (int v = 0; v < nn; ++v) {
        ps[v] = sorted_parents(g, v);
        pst[v] = config_strides(g, ps[v]);
        cards[v] = static_cast<std::size_t>(g.cardinality(v));
        cfg_counts[v] = 1;
        for (int p : ps[v]) cfg_counts[v] *= static_cast<std::size_t>(g.cardinality(p));
    }
    std::vector<int> zidx;
    for (const auto& name : covariates) zidx.push_back(g.index_of(name));
    std::size_t zcfgs = 1;
    std::vector<std::size_t> zstr(zidx.size());
    for (int i = static_cast<int>(zidx.size()) - 1; i >= 0; --i) {
        zstr[i] = zcfgs;
        zcfgs *= static_cast<std::size_t>(g.cardinality(zidx[i]));
    }

    // Flat CPT buffers, allocated once: cpt[v][cfg * card + value]. Rows are
    // drawn in exactly the order generate_cpts uses, so the two paths agree
    // draw for draw on a shared substream.
    std::vector<std::vector<double>> cpt(nn);
    for (int v = 0; v < nn; ++v) cpt[v].resize(cfg_counts[v] * cards[v]);

    std::vector<SimRecord> out;
    out.reserve(n);
    std::vector<double> acc(zcfgs * 4);
    std::vector<int> vals(nn);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, substream::kCpt, i);
        for (int v = 0; v < nn; ++v) {
            for (std::size_t cfg = 0; cfg < cfg_counts[v]; ++cfg) {
                double* row = &cpt[v][cfg * cards[v]];
                double total = 0.0;
                for (std::size_t k = 0; k < cards[v]; ++k) {
                    row[k] = rng.exp1();
                    total += row[k];
                }
                for (std::size_t k = 0; k < cards[v]; ++k) row[k] /= total;
            }
        }

        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t cell = 0; cell < cells; ++cell) {
            for (int v = 0; v < nn; ++v)
                vals[v] = static_cast<int>(cell / stride[v] % cards[v]);
            double p = 1.0;
            for (int v = 0; v < nn; ++v) {
                std::size_t cfg = 0;
                for (std::size_t k = 0; k < ps[v].size(); ++k)
                    cfg += pst[v][k] * static_cast<std::size_t>(vals[ps[v][k]]);
                p *= cpt[v][cfg * cards[v] + static_cast<std::size_t>(vals[v])];
            }
            std::size_t zc = 0;
            for (std::size_t k = 0; k < zidx.size(); ++k)
                zc += zstr[k] * static_cast<std::size_t>(vals[zidx[k]]);
            acc[zc * 4 + static_cast<std::size_t>(vals[xi]) * 2 +
                static_cast<std::size_t>(vals[yi])] += p;
        }

        KahanSum agg1, agg0, xy, xyp, xpy, xpyp, lo, up;
        for (std::size_t s = 0; s < zcfgs; ++s) {
            const double* a = &acc[s * 4];  // [x0y0, x0y1, x1y0, x1y1]
            const double pz = a[0] + a[1] + a[2] + a[3];
            if (pz == 0.0) continue;
            const double pzx = a[2] + a[3];
            const double pzxp = a[0] + a[1];
            if (pzx == 0.0 || pzxp == 0.0)
                throw UndefinedEstimandError(
                    "a covariate stratum carries no mass on one treatment arm");
            const double r1 = std::clamp(a[3] / pzx, 0.0, 1.0);
            const double r0 = std::clamp(a[1] / pzxp, 0.0, 1.0);
            agg1.add(pz * r1);
            agg0.add(pz * r0);
            xy.add(a[3]);
            xyp.add(a[2]);
            xpy.add(a[1]);
            xpyp.add(a[0]);
            lo.add(pz * std::max(0.0, r1 - r0));
            up.add(pz * std::min(r1, 1.0 - r0));
        }
        ExperimentalTable exp;
        exp.p_y_do_x = std::clamp(agg1.value(), 0.0, 1.0);
        exp.p_y_do_xp = std::clamp(agg0.value(), 0.0, 1.0);
        ObsMarginals m;
        m.xy = std::clamp(xy.value(), 0.0, 1.0);
        m.xyp = std::clamp(xyp.value(), 0.0, 1.0);
        m.xpy = std::clamp(xpy.value(), 0.0, 1.0);
        m.xpyp = std::clamp(xpyp.value(), 0.0, 1.0);

        SimRecord rec;
        rec.index = i;
        rec.tp = pns_tian_pearl(exp, m);
        // Containment is a theorem; snap away the last-ulp noise between the
        // two summation orders so emitted rows satisfy it exactly.
        rec.diagram = make_interval(
            std::clamp(lo.value(), rec.tp.lower, 1.0), "BackdoorSum",
            std::clamp(up.value(), 0.0, rec.tp.upper), "BackdoorSum");
        out.push_back(std::move(rec));
    }
    return out;
}

SimSummary summarize(const std::vector<SimRecord>& records) {
    if (records.empty()) throw std::invalid_argument("cannot summarize an empty run");
    KahanSum inc, dec, gwo, gw;
    for (const auto& r : records) {
        inc.add(r.diagram.lower - r.tp.lower);
        dec.add(r.tp.upper - r.diagram.upper);
        gwo.add(r.tp.width());
        gw.add(r.diagram.width());
    }
    SimSummary s;
    s.n = records.size();
    const double n = static_cast<double>(records.size());
    s.avg_increased_lower = inc.value() / n;
    s.avg_decreased_upper = dec.value() / n;
    s.avg_gap_without = gwo.value() / n;
    s.avg_gap_with = gw.value() / n;
    return s;
}

void emit_records_csv(const std::vector<SimRecord>& records, std::ostream& out) {
    const auto old = out.precision(17);
    out << "index,tp_lower,tp_upper,diagram_lower,diagram_upper\n";
    for (const auto& r : records)
        out << r.index << ',' << r.tp.lower << ',' << r.tp.upper << ','
            << r.diagram.lower << ',' << r.diagram.upper << '\n';
    out.precision(old);
}

void emit_plot_data(const std::vector<SimRecord>& records, std::size_t k,
                    std::uint64_t seed, std::ostream& out) {
    if (k > records.size())
        throw std::invalid_argument("cannot plot " + std::to_string(k) + " of " +
                                    std::to_string(records.size()) + " records");
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::substream(seed, substream::kPlotPick, 0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.below(order.size() - i));
        std::swap(order[i], order[j]);
    }
    order.resize(k);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double wa = records[a].diagram.width();
        const double wb = records[b].diagram.width();
        if (wa != wb) return wa < wb;
        return records[a].index < records[b].index;
    });
    const auto old = out.precision(17);
    out << "index,tp_lower,diagram_lower,diagram_upper,tp_upper\n";
    for (std::size_t idx : order) {
        const auto& r = records[idx];
        out << r.index << ',' << r.tp.lower << ',' << r.diagram.lower << ','
            << r.diagram.upper << ',' << r.tp.upper << '\n';
    }
    out.precision(old);
}

} // namespace poc
