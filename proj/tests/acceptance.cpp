// Acceptance checks for the bounds library. Each criterion prints one
// [PASS]/[FAIL] line with the measured numbers and its pinned tolerance;
// the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pocbounds/bounds.hpp"
#include "pocbounds/presets.hpp"
#include "pocbounds/rng.hpp"
#include "pocbounds/scm.hpp"
#include "pocbounds/sim.hpp"
#include "pocbounds/tables.hpp"

using namespace poc;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const std::string& name, bool ok, const std::string& detail, double ms) {
    if (!ok) ++failures;
    std::ostringstream line;
    line << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << " ("
         << std::fixed << std::setprecision(0) << ms << " ms)";
    std::cout << line.str() << std::endl;
}

std::string fmt_interval(const BoundInterval& b) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << "[" << b.lower << ", " << b.upper
       << "]";
    return os.str();
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

bool interval_near(const BoundInterval& b, double lo, double up, double tol) {
    return near(b.lower, lo, tol) && near(b.upper, up, tol);
}

// ---- criterion 1: drug example -------------------------------------------

void drug_example() {
    const auto t0 = Clock::now();
    const Problem p = drug_problem();
    const ExperimentalTable adj =
        adjustment_formula(*p.observational, {"Z"}, "X", "Y");
    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t2 = compute(p, {Estimand::PNS, Method::Thm2, {}});

    const bool ok = near(adj.p_y_do_x, 0.597, 1e-3) &&
                    near(adj.p_y_do_xp, 0.696, 1e-3) &&
                    interval_near(tp.interval, 0.0, 0.297, 1e-3) &&
                    interval_near(t2.interval, 0.0, 0.0146, 5e-4);
    const double ms = ms_since(t0);
    std::ostringstream d;
    d << std::fixed << std::setprecision(4) << "adjustment " << adj.p_y_do_x << "/"
      << adj.p_y_do_xp << " (+-0.001), tian-pearl " << fmt_interval(tp.interval)
      << " vs [0, 0.297] (+-0.001), thm2 " << fmt_interval(t2.interval)
      << " vs [0, 0.0146] (+-0.0005; two-decimal reports round this to 0.01)";
    report("drug example", ok && ms < 1000.0, d.str(), ms);
}

// ---- criterion 2: inflammation example ------------------------------------

void inflammation_example() {
    const auto t0 = Clock::now();
    const Problem p = inflammation_problem();
    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t4 = compute(p, {Estimand::PNS, Method::Thm4, {}});
    const bool ok = near(tp.interval.upper, 0.5, 1e-12) &&
                    near(t4.interval.upper, 0.1, 1e-12);
    const double ms = ms_since(t0);
    std::ostringstream d;
    d << "tian-pearl upper " << fmt_interval(tp.interval) << ", thm4 "
      << fmt_interval(t4.interval) << " (each +-1e-12)";
    report("inflammation example", ok && ms < 1000.0, d.str(), ms);
}

// ---- criterion 3: ancestry example -----------------------------------------

void ancestry_example() {
    const auto t0 = Clock::now();
    const Problem p = ancestry_problem();
    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t1 = compute(p, {Estimand::PNS, Method::Thm1, {}});
    const ComputeResult cz = compute(p, {Estimand::PNS, Method::Conditional, "z"});
    const ComputeResult czp = compute(p, {Estimand::PNS, Method::Conditional, "z'"});
    const bool ok = interval_near(tp.interval, 0.1, 0.5, 1e-12) &&
                    interval_near(t1.interval, 0.275, 0.5, 1e-12) &&
                    interval_near(cz.interval, 0.55, 0.75, 1e-12) &&
                    interval_near(czp.interval, 0.0, 0.25, 1e-12);
    std::ostringstream d;
    d << "tian-pearl " << fmt_interval(tp.interval) << ", thm1 "
      << fmt_interval(t1.interval) << ", stratum z " << fmt_interval(cz.interval)
      << ", stratum z' " << fmt_interval(czp.interval) << " (each +-1e-12)";
    report("ancestry example", ok, d.str(), ms_since(t0));
}

// ---- criterion 4: coin-toss example ----------------------------------------

void cointoss_example() {
    const auto t0 = Clock::now();
    const Problem p = cointoss_problem();
    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t1 = compute(p, {Estimand::PNS, Method::Thm1, {}});

    // The explicit betting model: Y wins exactly when the guess X matches the
    // coin Z, i.e. response type 9 over Y's four (z, x) parent configurations.
    std::vector<std::vector<double>> laws(3);
    laws[0] = {0.5, 0.5};
    laws[1] = {0.5, 0.5};
    laws[2] = std::vector<double>(16, 0.0);
    laws[2][9] = 1.0;
    const ResponseFunctionScm betting(fig1b(), laws);
    const double pns = betting.true_values().pns;

    const bool ok = interval_near(tp.interval, 0.0, 0.5, 1e-12) &&
                    interval_near(t1.interval, 0.5, 0.5, 1e-12) && pns == 0.5;
    std::ostringstream d;
    d << "tian-pearl " << fmt_interval(tp.interval) << ", thm1 "
      << fmt_interval(t1.interval) << ", oracle pns " << pns << " (exact)";
    report("cointoss example", ok, d.str(), ms_since(t0));
}

// ---- criterion 5: simulation benchmark --------------------------------------

void table2() {
    struct Row {
        const char* preset;
        double targets[4];
    };
    const Row rows[] = {
        {"fig1a", {0.026, 0.026, 0.219, 0.166}},
        {"fig4", {0.050, 0.050, 0.267, 0.166}},
        {"fig5", {0.032, 0.032, 0.231, 0.166}},
        {"fig1a-z1024", {0.158, 0.158, 0.483, 0.166}},
    };
    const auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream d;
    d << std::fixed << std::setprecision(4);
    for (const Row& row : rows) {
        const SimPreset sp = sim_preset(row.preset);
        const SimSummary s =
            summarize(run_simulation(sp.graph, sp.covariates, 100000, 1));
        const double got[4] = {s.avg_increased_lower, s.avg_decreased_upper,
                               s.avg_gap_without, s.avg_gap_with};
        for (int i = 0; i < 4; ++i) ok = ok && near(got[i], row.targets[i], 5e-3);
        d << row.preset << " " << got[0] << "/" << got[1] << "/" << got[2] << "/"
          << got[3] << "  ";
    }
    const double ms = ms_since(t0);
    d << "(each entry +-0.005, n=100000)";
    report("simulation benchmark", ok && ms < 600000.0, d.str(), ms);
}

// ---- criterion 6: validity suite -------------------------------------------

void validity_suite() {
    struct Family {
        const char* name;
        CausalDiagram graph;
        std::vector<std::string> covariates;
    };
    const Family families[] = {
        {"fig1a", fig1a(), {"Z"}},
        {"fig2", fig2(), {"Z"}},
        {"fig3", fig3(), {"Z"}},
        {"fig4", fig4(), {"Z1", "Z2"}},
    };
    constexpr std::size_t kModels = 10000;
    constexpr double kSlack = 1e-9;

    const auto t0 = Clock::now();
    std::size_t bound_violations = 0;
    std::size_t complier_violations = 0;
    std::size_t checked = 0;
    for (const Family& fam : families) {
        const int yi = fam.graph.index_of("Y");
        const int zi = fam.graph.has_node("Z") ? fam.graph.index_of("Z") : -1;
        std::vector<int> w1(static_cast<std::size_t>(fam.graph.node_count()));
        std::vector<int> w0(w1.size());
        for (std::size_t seed = 1; seed <= kModels; ++seed) {
            const ResponseFunctionScm scm =
                ResponseFunctionScm::random(fam.graph, seed);
            const TrueValues tv = scm.true_values();
            const Observables obs = scm.observables(fam.covariates);
            const Problem p{fam.graph, obs.joint, obs.experimental, obs.mediator,
                            fam.covariates};
            const ComputeResult r = compute(p, Query{});
            ++checked;
            for (const MethodResult& mr : r.evaluated)
                if (!mr.interval.contains(tv.pns, kSlack)) ++bound_violations;
            if (!r.interval.contains(tv.pns, kSlack)) ++bound_violations;

            const ObsMarginals m = ObsMarginals::from_table(obs.joint, "X", "Y");
            if (tv.pn_defined &&
                !pn_tian_pearl(obs.experimental, m).contains(tv.pn, kSlack))
                ++bound_violations;
            if (tv.ps_defined &&
                !ps_tian_pearl(obs.experimental, m).contains(tv.ps, kSlack))
                ++bound_violations;

            // Defining property of the pure-mediator chain: a unit whose
            // outcome reacts to treatment must have a reacting mediator.
            if (std::string(fam.name) == "fig3") {
                scm.for_each_unit([&](double, const std::vector<std::size_t>& u) {
                    scm.eval_world(u, 1, w1);
                    scm.eval_world(u, 0, w0);
                    if (w1[static_cast<std::size_t>(yi)] !=
                            w0[static_cast<std::size_t>(yi)] &&
                        w1[static_cast<std::size_t>(zi)] ==
                            w0[static_cast<std::size_t>(zi)])
                        ++complier_violations;
                });
            }
        }
    }
    const bool ok = bound_violations == 0 && complier_violations == 0;
    std::ostringstream d;
    d << checked << " models across fig1a/fig2/fig3/fig4, " << bound_violations
      << " bound violations (slack 1e-9), " << complier_violations
      << " complier-property violations on fig3";
    report("validity suite", ok, d.str(), ms_since(t0));
}

// ---- criterion 7: containment suite ----------------------------------------

void containment_suite() {
    constexpr std::size_t kSets = 10000;
    constexpr double kSlack = 1e-12;
    const auto t0 = Clock::now();
    Rng rng = Rng::substream(2024, substream::kProbe, 1);

    std::size_t thm1_violations = 0;
    for (std::size_t i = 0; i < kSets; ++i) {
        const std::size_t k = 2 + rng.below(4);
        std::vector<double> w(k);
        double wsum = 0.0;
        for (double& v : w) wsum += (v = rng.exp1());
        std::vector<ThmStratum> strata;
        KahanSum ax, axp, cxy, cxyp, cxpy, cxpyp;
        for (std::size_t s = 0; s < k; ++s) {
            ThmStratum st;
            st.label = "s" + std::to_string(s);
            st.p_z = w[s] / wsum;
            double raw[4];
            double rsum = 0.0;
            for (double& v : raw) rsum += (v = rng.exp1());
            ObsMarginals m;
            m.xy = raw[0] / rsum;
            m.xyp = raw[1] / rsum;
            m.xpy = raw[2] / rsum;
            m.xpyp = raw[3] / rsum;
            st.obs = m;
            // Rates drawn inside the coherent box for the stratum's cells.
            st.p_y_do_x = m.xy + rng.uniform01() * (m.xpy + m.xpyp);
            st.p_y_do_xp = m.xpy + rng.uniform01() * (m.xy + m.xyp);
            ax.add(st.p_z * st.p_y_do_x);
            axp.add(st.p_z * st.p_y_do_xp);
            cxy.add(st.p_z * m.xy);
            cxyp.add(st.p_z * m.xyp);
            cxpy.add(st.p_z * m.xpy);
            cxpyp.add(st.p_z * m.xpyp);
            strata.push_back(std::move(st));
        }
        ExperimentalTable exp;
        exp.p_y_do_x = ax.value();
        exp.p_y_do_xp = axp.value();
        ObsMarginals agg;
        agg.xy = cxy.value();
        agg.xyp = cxyp.value();
        agg.xpy = cxpy.value();
        agg.xpyp = cxpyp.value();
        const double total = agg.xy + agg.xyp + agg.xpy + agg.xpyp;
        agg.xy /= total;
        agg.xyp /= total;
        agg.xpy /= total;
        agg.xpyp /= total;

        const BoundInterval fine = pns_thm1(strata);
        const BoundInterval coarse = pns_tian_pearl(exp, agg);
        if (fine.lower < coarse.lower - kSlack || fine.upper > coarse.upper + kSlack)
            ++thm1_violations;
    }

    std::size_t mediator_violations = 0;
    for (std::size_t i = 0; i < kSets; ++i) {
        const std::size_t k = 2 + rng.below(3);
        MediatorTables med;
        std::vector<double> zx(k), zxp(k);
        double sx = 0.0, sxp = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            sx += (zx[j] = rng.exp1());
            sxp += (zxp[j] = rng.exp1());
        }
        for (double& v : zx) v /= sx;
        for (double& v : zxp) v /= sxp;
        med.p_z_do_x = zx;
        med.p_z_do_xp = zxp;

        ExperimentalTable exp;
        KahanSum cx, cxp;
        const bool pure = i % 2 == 0;
        if (pure) {
            std::vector<double> yz(k);
            for (double& v : yz) v = rng.uniform01();
            for (std::size_t j = 0; j < k; ++j) {
                cx.add(yz[j] * zx[j]);
                cxp.add(yz[j] * zxp[j]);
            }
            med.p_y_given_z = std::move(yz);
        } else {
            std::vector<std::array<double, 2>> yzx(k);
            for (auto& row : yzx) row = {rng.uniform01(), rng.uniform01()};
            for (std::size_t j = 0; j < k; ++j) {
                cx.add(yzx[j][1] * zx[j]);
                cxp.add(yzx[j][0] * zxp[j]);
            }
            med.p_y_given_zx = std::move(yzx);
        }
        exp.p_y_do_x = cx.value();
        exp.p_y_do_xp = cxp.value();

        const BoundInterval tp = pns_tian_pearl(exp, std::nullopt);
        const BoundInterval sharp = pure ? pns_thm4(exp, std::nullopt, med)
                                         : pns_thm3(exp, std::nullopt, med);
        if (sharp.upper > tp.upper + kSlack) ++mediator_violations;
    }

    const bool ok = thm1_violations == 0 && mediator_violations == 0;
    std::ostringstream d;
    d << kSets << " stratified sets: " << thm1_violations
      << " thm1-containment violations; " << kSets << " mediator sets: "
      << mediator_violations << " thm3/thm4 upper violations (slack 1e-12)";
    report("containment suite", ok, d.str(), ms_since(t0));
}

// ---- criterion 8: tightness probe ------------------------------------------

void tightness_probe() {
    constexpr double kTol = 2e-3;
    const auto t0 = Clock::now();
    std::size_t checked = 0;
    double worst = 0.0;
    bool ok = true;
    for (std::uint64_t seed = 1; checked < 100; ++seed) {
        const ResponseFunctionScm scm = ResponseFunctionScm::random(bare(), seed);
        const TrueValues tv = scm.true_values();
        if (!tv.pn_defined) continue;  // need P(x,y) > 0 for the PN probe
        const Observables obs = scm.observables();
        const ObsMarginals m = ObsMarginals::from_table(obs.joint, "X", "Y");
        ExtremizeInputs in;
        in.marginals = m;
        in.experimental = obs.experimental;

        const BoundInterval tp = pns_tian_pearl(obs.experimental, m);
        const BoundInterval pn = pn_tian_pearl(obs.experimental, m);
        for (const LpRoute route : {LpRoute::Simplex, LpRoute::Enumerate}) {
            const ExtremizeResult lp_pns =
                extremize_estimand(bare(), in, Estimand::PNS, route);
            const ExtremizeResult lp_pn =
                extremize_estimand(bare(), in, Estimand::PN, route);
            for (const double gap :
                 {std::abs(lp_pns.lower - tp.lower), std::abs(lp_pns.upper - tp.upper),
                  std::abs(lp_pn.lower - pn.lower), std::abs(lp_pn.upper - pn.upper)}) {
                worst = std::max(worst, gap);
                ok = ok && gap <= kTol;
            }
        }
        ++checked;
    }
    std::ostringstream d;
    d << std::scientific << std::setprecision(2) << checked
      << " bare-graph instances, simplex and enumeration routes, worst |lp - "
         "tian-pearl| = "
      << worst << " (tolerance 2e-3, pns and pn)";
    report("tightness probe", ok, d.str(), ms_since(t0));
}

} // namespace

int main() {
    drug_example();
    inflammation_example();
    ancestry_example();
    cointoss_example();
    table2();
    validity_suite();
    containment_suite();
    tightness_probe();
    std::cout << (failures == 0 ? "acceptance: all 8 criteria passed"
                                : "acceptance: FAILED")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
