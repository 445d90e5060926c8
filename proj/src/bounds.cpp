#include "pocbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pocbounds/errors.hpp"

namespace poc {

namespace {

constexpr double kCrossTol = 1e-9;
constexpr double kCoherenceTol = 1e-6;

struct Arg {
    const char* label;
    double value;
};

std::pair<double, std::string> take_max(const std::vector<Arg>& args) {
    const Arg* best = &args.front();
    for (const auto& a : args)
        if (a.value > best->value) best = &a;
    return {best->value, best->label};
}

std::pair<double, std::string> take_min(const std::vector<Arg>& args) {
    const Arg* best = &args.front();
    for (const auto& a : args)
        if (a.value < best->value) best = &a;
    return {best->value, best->label};
}

// Shared PN formula; PS and the conditional variants feed it relabeled or
// per-stratum inputs, so the fixed argument labels are the same everywhere:
//   lower: Zero = 0, ObsExcess = (P(y)-P(y_x')) / P(x,y)
//   upper: One = 1, ExpShortfall = (P(y'_x')-P(x',y')) / P(x,y)
BoundInterval pn_impl(double p_y_do_x, double p_y_do_xp, const ObsMarginals& obs,
                      const char* joint_name) {
    ExperimentalTable exp;
    exp.p_y_do_x = p_y_do_x;
    exp.p_y_do_xp = p_y_do_xp;
    exp.validate();
    obs.validate();
    require_coherent(exp, obs);
    if (!(obs.xy > 0.0))
        throw UndefinedEstimandError(std::string(joint_name) +
                                     " = 0; the estimand conditions on it");
    const auto [lo, blo] = take_max(
        {{"Zero", 0.0}, {"ObsExcess", (obs.y() - p_y_do_xp) / obs.xy}});
    const auto [up, bup] = take_min(
        {{"One", 1.0}, {"ExpShortfall", ((1.0 - p_y_do_xp) - obs.xpyp) / obs.xy}});
    return make_interval(lo, blo, up, bup);
}

// PS inputs are the PN inputs under the relabeling x <-> x', y <-> y'.
ExperimentalTable relabel(const ExperimentalTable& exp) {
    ExperimentalTable out;
    out.p_y_do_x = 1.0 - exp.p_y_do_xp;
    out.p_y_do_xp = 1.0 - exp.p_y_do_x;
    return out;
}

ObsMarginals relabel(const ObsMarginals& m) {
    ObsMarginals out;
    out.xy = m.xpyp;
    out.xyp = m.xpy;
    out.xpy = m.xyp;
    out.xpyp = m.xy;
    return out;
}

} // namespace

std::string to_string(Estimand e) {
    switch (e) {
        case Estimand::PNS: return "pns";
        case Estimand::PN: return "pn";
        case Estimand::PS: return "ps";
    }
    return "?";
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Auto: return "auto";
        case Method::TianPearl: return "tian_pearl";
        case Method::Conditional: return "conditional";
        case Method::Thm1: return "thm1";
        case Method::Thm2: return "thm2";
        case Method::Thm3: return "thm3";
        case Method::Thm4: return "thm4";
    }
    return "?";
}

Estimand estimand_from_string(const std::string& s) {
    std::string t;
    for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "pns") return Estimand::PNS;
    if (t == "pn") return Estimand::PN;
    if (t == "ps") return Estimand::PS;
    throw std::invalid_argument("unknown estimand '" + s + "' (want pns, pn or ps)");
}

Method method_from_string(const std::string& s) {
    std::string t;
    for (char c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        t += (c == '-') ? '_' : c;
    }
    if (t == "auto") return Method::Auto;
    if (t == "tian_pearl") return Method::TianPearl;
    if (t == "conditional") return Method::Conditional;
    if (t == "thm1") return Method::Thm1;
    if (t == "thm2") return Method::Thm2;
    if (t == "thm3") return Method::Thm3;
    if (t == "thm4") return Method::Thm4;
    throw std::invalid_argument("unknown method '" + s + "'");
}

BoundInterval make_interval(double lower, std::string binding_lower, double upper,
                            std::string binding_upper) {
    if (lower > upper + kCrossTol)
        throw IncoherentDataError("bound interval crossed: lower " +
                                  std::to_string(lower) + " > upper " +
                                  std::to_string(upper));
    lower = std::clamp(lower, 0.0, 1.0);
    upper = std::clamp(upper, 0.0, 1.0);
    if (lower > upper) lower = upper;  // collapse sub-tolerance crossings
    BoundInterval b;
    b.lower = lower;
    b.upper = upper;
    b.binding_lower = std::move(binding_lower);
    b.binding_upper = std::move(binding_upper);
    return b;
}

BoundInterval pns_tian_pearl(const ExperimentalTable& exp,
                             const std::optional<ObsMarginals>& obs) {
    exp.validate();
    // Fixed argument labels, in the order the formulas list the terms:
    //   lower: Zero = 0, ExpDiff = P(y_x)-P(y_x'),
    //          ObsLowerY = P(y)-P(y_x'), ObsUpperY = P(y_x)-P(y)
    //   upper: ExpYx = P(y_x), ExpYprimeXprime = P(y'_x'),
    //          ObsJoint = P(x,y)+P(x',y'),
    //          ExpDiffPlusObs = P(y_x)-P(y_x')+P(x,y')+P(x',y)
    std::vector<Arg> lo{{"Zero", 0.0}, {"ExpDiff", exp.p_y_do_x - exp.p_y_do_xp}};
    std::vector<Arg> up{{"ExpYx", exp.p_y_do_x},
                        {"ExpYprimeXprime", 1.0 - exp.p_y_do_xp}};
    if (obs) {
        obs->validate();
        require_coherent(exp, *obs);
        lo.push_back({"ObsLowerY", obs->y() - exp.p_y_do_xp});
        lo.push_back({"ObsUpperY", exp.p_y_do_x - obs->y()});
        up.push_back({"ObsJoint", obs->xy + obs->xpyp});
        up.push_back({"ExpDiffPlusObs",
                      exp.p_y_do_x - exp.p_y_do_xp + obs->xyp + obs->xpy});
    }
    const auto [l, bl] = take_max(lo);
    const auto [u, bu] = take_min(up);
    return make_interval(l, bl, u, bu);
}

BoundInterval pn_tian_pearl(const ExperimentalTable& exp, const ObsMarginals& obs) {
    return pn_impl(exp.p_y_do_x, exp.p_y_do_xp, obs, "P(x,y)");
}

BoundInterval ps_tian_pearl(const ExperimentalTable& exp, const ObsMarginals& obs) {
    exp.validate();
    return pn_impl(1.0 - exp.p_y_do_xp, 1.0 - exp.p_y_do_x, relabel(obs), "P(x',y')");
}

BoundInterval pns_conditional(const ExperimentalStratum& s,
                              const std::optional<ObsMarginals>& obs_z) {
    ExperimentalTable exp;
    exp.p_y_do_x = s.p_y_do_x;
    exp.p_y_do_xp = s.p_y_do_xp;
    return pns_tian_pearl(exp, obs_z);
}

BoundInterval pn_conditional(const ExperimentalStratum& s, const ObsMarginals& obs_z) {
    return pn_impl(s.p_y_do_x, s.p_y_do_xp, obs_z, "P(x,y|z)");
}

BoundInterval ps_conditional(const ExperimentalStratum& s, const ObsMarginals& obs_z) {
    return pn_impl(1.0 - s.p_y_do_xp, 1.0 - s.p_y_do_x, relabel(obs_z), "P(x',y'|z)");
}

BoundInterval pns_thm1(const std::vector<ThmStratum>& strata) {
    if (strata.empty())
        throw std::invalid_argument("theorem 1 needs at least one stratum");
    KahanSum weight, lo, up;
    for (const auto& s : strata) {
        if (!(s.p_z >= 0.0 && s.p_z <= 1.0))
            throw std::invalid_argument("stratum '" + s.label + "' weight " +
                                        std::to_string(s.p_z));
        weight.add(s.p_z);
        if (s.p_z == 0.0) continue;  // zero-weight strata contribute nothing
        ExperimentalStratum e;
        e.label = s.label;
        e.p_z = s.p_z;
        e.p_y_do_x = s.p_y_do_x;
        e.p_y_do_xp = s.p_y_do_xp;
        const BoundInterval b = pns_conditional(e, s.obs);
        lo.add(s.p_z * b.lower);
        up.add(s.p_z * b.upper);
    }
    if (std::abs(weight.value() - 1.0) > kCrossTol)
        throw std::invalid_argument("stratum weights sum to " +
                                    std::to_string(weight.value()));
    return make_interval(lo.value(), "StratifiedSum", up.value(), "StratifiedSum");
}

BoundInterval pns_thm2(const ObservationalTable& t, const std::vector<std::string>& z,
                       const std::string& x_name, const std::string& y_name) {
    const ExperimentalTable adj = adjustment_formula(t, z, x_name, y_name);
    KahanSum lo, up;
    for (const auto& s : adj.strata) {
        lo.add(s.p_z * std::max(0.0, s.p_y_do_x - s.p_y_do_xp));
        up.add(s.p_z * std::min(s.p_y_do_x, 1.0 - s.p_y_do_xp));
    }
    return make_interval(lo.value(), "BackdoorSum", up.value(), "BackdoorSum");
}

BoundInterval pns_thm3(const ExperimentalTable& exp,
                       const std::optional<ObsMarginals>& obs,
                       const MediatorTables& med) {
    med.validate();
    if (!med.p_y_given_zx)
        throw std::invalid_argument("theorem 3 needs P(y|z,x)");
    const BoundInterval tp = pns_tian_pearl(exp, obs);
    KahanSum term;
    const auto& yzx = *med.p_y_given_zx;
    const int k = med.z_card();
    for (int z = 0; z < k; ++z)
        for (int zp = 0; zp < k; ++zp)
            term.add(std::min(yzx[z][1], 1.0 - yzx[zp][0]) *
                     std::min(med.p_z_do_x[z], med.p_z_do_xp[zp]));
    if (term.value() < tp.upper)
        return make_interval(tp.lower, tp.binding_lower, term.value(),
                             "MediatorPairSum");
    return tp;
}

BoundInterval pns_thm4(const ExperimentalTable& exp,
                       const std::optional<ObsMarginals>& obs,
                       const MediatorTables& med) {
    med.validate();
    if (!med.p_y_given_z)
        throw std::invalid_argument("theorem 4 needs P(y|z)");
    const BoundInterval tp = pns_tian_pearl(exp, obs);
    KahanSum term;
    const auto& yz = *med.p_y_given_z;
    const int k = med.z_card();
    for (int z = 0; z < k; ++z)
        for (int zp = 0; zp < k; ++zp) {
            if (zp == z) continue;
            term.add(std::min(yz[z], 1.0 - yz[zp]) *
                     std::min(med.p_z_do_x[z], med.p_z_do_xp[zp]));
        }
    if (term.value() < tp.upper)
        return make_interval(tp.lower, tp.binding_lower, term.value(),
                             "MediatorPairSum");
    return tp;
}

namespace {

// Per-stratum observational cells attach only when the observational table
// covers every covariate, the stratum count matches the covariate
// configuration count, and the stratum weights agree with the table within
// the cross-table tolerance. Stratum i corresponds to configuration i,
// row-major with the last covariate fastest (the adjustment enumeration).
std::vector<ThmStratum> build_thm1_strata(const ExperimentalTable& exp,
                                          const std::optional<ObservationalTable>& obs,
                                          const std::vector<std::string>& covariates,
                                          const std::string& x_name,
                                          const std::string& y_name) {
    std::vector<ThmStratum> out;
    bool attach = obs.has_value() && !covariates.empty();
    std::vector<int> cards;
    if (attach) {
        for (const auto& name : covariates) {
            if (!obs->has_variable(name)) {
                attach = false;
                break;
            }
            cards.push_back(obs->variables()[obs->index_of(name)].card);
        }
    }
    if (attach) {
        std::size_t configs = 1;
        for (int c : cards) configs *= static_cast<std::size_t>(c);
        attach = configs == exp.strata.size();
    }

    for (std::size_t i = 0; i < exp.strata.size(); ++i) {
        const auto& s = exp.strata[i];
        ThmStratum t;
        t.label = s.label;
        t.p_z = s.p_z;
        t.p_y_do_x = s.p_y_do_x;
        t.p_y_do_xp = s.p_y_do_xp;
        if (attach) {
            Assignment z_assign;
            std::size_t rest = i;
            for (int k = static_cast<int>(covariates.size()) - 1; k >= 0; --k) {
                z_assign.emplace_back(covariates[k],
                                      static_cast<int>(rest % static_cast<std::size_t>(cards[k])));
                rest /= static_cast<std::size_t>(cards[k]);
            }
            std::reverse(z_assign.begin(), z_assign.end());
            const double mass = obs->mass(z_assign);
            if (std::abs(mass - s.p_z) > kCoherenceTol)
                throw IncoherentDataError("stratum '" + s.label + "' weight " +
                                          std::to_string(s.p_z) +
                                          " disagrees with the observational table (" +
                                          std::to_string(mass) + ")");
            if (mass > 0.0)
                t.obs = ObsMarginals::from_table(
                    obs->conditional({x_name, y_name}, z_assign), x_name, y_name);
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace

ComputeResult compute(const Problem& p, const Query& q) {
    if (!p.observational && !p.experimental && !p.mediator)
        throw std::invalid_argument("problem carries no data tables");
    if (q.stratum && q.method != Method::Conditional)
        throw std::invalid_argument("--stratum applies only to the conditional method");

    std::set<std::string> zset;
    for (const auto& name : p.covariates)
        if (!zset.insert(name).second)
            throw std::invalid_argument("duplicate covariate '" + name + "'");

    const Eligibility elig = p.diagram.classify_covariates(zset);
    const std::string& xn = p.diagram.treatment();
    const std::string& yn = p.diagram.outcome();

    std::optional<ObsMarginals> obsm;
    if (p.observational) obsm = ObsMarginals::from_table(*p.observational, xn, yn);

    const bool obs_covers_z = [&] {
        if (!p.observational || p.covariates.empty()) return false;
        for (const auto& name : p.covariates)
            if (!p.observational->has_variable(name)) return false;
        return true;
    }();

    // Reconstruct experimental rates when identifiable: back-door adjustment
    // first, mediator chaining (P(y_x) = sum_z P(y|z) P(z_x)) on the pure
    // mediator shape otherwise.
    std::optional<ExperimentalTable> exp = p.experimental;
    bool derived = false;
    if (exp) exp->validate();
    if (!exp && obs_covers_z && elig.thm2_backdoor.eligible) {
        try {
            exp = adjustment_formula(*p.observational, p.covariates, xn, yn);
            derived = true;
        } catch (const UndefinedEstimandError&) {
            // some stratum lacks an arm; leave experimental rates unknown
        }
    }
    if (!exp && p.mediator && p.mediator->p_y_given_z &&
        elig.thm4_pure_mediator.eligible) {
        p.mediator->validate();
        KahanSum cx, cxp;
        const auto& yz = *p.mediator->p_y_given_z;
        for (int z = 0; z < p.mediator->z_card(); ++z) {
            cx.add(yz[z] * p.mediator->p_z_do_x[z]);
            cxp.add(yz[z] * p.mediator->p_z_do_xp[z]);
        }
        ExperimentalTable chained;
        chained.p_y_do_x = cx.value();
        chained.p_y_do_xp = cxp.value();
        exp = chained;
        derived = true;
    }

    const auto require = [](bool ok, const std::string& why) {
        if (!ok) throw IneligibleMethodError(why);
    };

    const auto eval = [&](Method m) -> BoundInterval {
        switch (m) {
            case Method::TianPearl: {
                require(exp.has_value(),
                        "tian_pearl needs experimental rates; none were supplied and "
                        "none are identifiable from the diagram");
                if (q.estimand == Estimand::PNS) return pns_tian_pearl(*exp, obsm);
                require(obsm.has_value(),
                        to_string(q.estimand) + " needs observational data");
                return q.estimand == Estimand::PN ? pn_tian_pearl(*exp, *obsm)
                                                  : ps_tian_pearl(*exp, *obsm);
            }
            case Method::Conditional: {
                require(q.stratum.has_value(), "conditional method needs --stratum");
                require(exp.has_value() && !exp->strata.empty(),
                        "conditional method needs stratified experimental rates");
                const auto strata =
                    build_thm1_strata(*exp, p.observational, p.covariates, xn, yn);
                const ThmStratum* hit = nullptr;
                for (const auto& s : strata)
                    if (s.label == *q.stratum) hit = &s;
                if (!hit) {
                    std::string labels;
                    for (const auto& s : strata) labels += " '" + s.label + "'";
                    throw std::invalid_argument("unknown stratum '" + *q.stratum +
                                                "'; have" + labels);
                }
                ExperimentalStratum e;
                e.label = hit->label;
                e.p_z = hit->p_z;
                e.p_y_do_x = hit->p_y_do_x;
                e.p_y_do_xp = hit->p_y_do_xp;
                if (q.estimand == Estimand::PNS) return pns_conditional(e, hit->obs);
                require(hit->obs.has_value(),
                        to_string(q.estimand) +
                            " within a stratum needs that stratum's observational cells");
                return q.estimand == Estimand::PN ? pn_conditional(e, *hit->obs)
                                                  : ps_conditional(e, *hit->obs);
            }
            case Method::Thm1: {
                require(q.estimand == Estimand::PNS, "theorem 1 bounds PNS only");
                require(elig.thm1_nondescendant.eligible,
                        elig.thm1_nondescendant.justification);
                require(exp.has_value() && !exp->strata.empty(),
                        "theorem 1 needs per-stratum experimental rates (supplied "
                        "directly or via back-door adjustment)");
                return pns_thm1(
                    build_thm1_strata(*exp, p.observational, p.covariates, xn, yn));
            }
            case Method::Thm2: {
                require(q.estimand == Estimand::PNS, "theorem 2 bounds PNS only");
                require(elig.thm2_backdoor.eligible, elig.thm2_backdoor.justification);
                require(obs_covers_z,
                        "theorem 2 needs an observational table over the covariates");
                return pns_thm2(*p.observational, p.covariates, xn, yn);
            }
            case Method::Thm3: {
                require(q.estimand == Estimand::PNS, "theorem 3 bounds PNS only");
                require(elig.thm3_partial_mediator.eligible,
                        elig.thm3_partial_mediator.justification);
                require(p.mediator && p.mediator->p_y_given_zx,
                        "theorem 3 needs mediator tables with P(y|z,x)");
                require(exp.has_value(), "theorem 3 needs experimental rates");
                return pns_thm3(*exp, obsm, *p.mediator);
            }
            case Method::Thm4: {
                require(q.estimand == Estimand::PNS, "theorem 4 bounds PNS only");
                require(elig.thm4_pure_mediator.eligible,
                        elig.thm4_pure_mediator.justification);
                require(p.mediator && p.mediator->p_y_given_z,
                        "theorem 4 needs mediator tables with P(y|z)");
                require(exp.has_value(), "theorem 4 needs experimental rates");
                return pns_thm4(*exp, obsm, *p.mediator);
            }
            default:
                throw std::logic_error("eval called with auto");
        }
    };

    ComputeResult result;
    result.estimand = q.estimand;
    result.method = q.method;
    result.eligibility = elig;
    result.experimental_derived = derived;

    if (q.method != Method::Auto) {
        result.interval = eval(q.method);
        result.method_lower = result.method_upper = q.method;
        result.evaluated.push_back({q.method, result.interval});
        return result;
    }

    if (q.estimand != Estimand::PNS) {
        // Population PN/PS come from the Tian-Pearl formulas alone.
        result.interval = eval(Method::TianPearl);
        result.method_lower = result.method_upper = Method::TianPearl;
        result.evaluated.push_back({Method::TianPearl, result.interval});
        return result;
    }

    // Auto PNS: intersect every eligible population-level method. Theorem 1
    // joins only with natively stratified experimental data; with adjusted
    // strata it reproduces theorem 2 exactly. The z-specific conditional
    // bound answers a different query and never joins the intersection.
    std::vector<Method> candidates;
    if (exp) candidates.push_back(Method::TianPearl);
    if (elig.thm1_nondescendant.eligible && p.experimental &&
        !p.experimental->strata.empty())
        candidates.push_back(Method::Thm1);
    if (elig.thm2_backdoor.eligible && obs_covers_z)
        candidates.push_back(Method::Thm2);
    if (elig.thm3_partial_mediator.eligible && p.mediator &&
        p.mediator->p_y_given_zx && exp)
        candidates.push_back(Method::Thm3);
    if (elig.thm4_pure_mediator.eligible && p.mediator && p.mediator->p_y_given_z &&
        exp)
        candidates.push_back(Method::Thm4);
    if (candidates.empty())
        throw IneligibleMethodError(
            "no bounding method is both eligible for this diagram and supported "
            "by the supplied tables");

    bool first = true;
    BoundInterval acc;
    for (Method m : candidates) {
        BoundInterval b;
        try {
            b = eval(m);
        } catch (const UndefinedEstimandError&) {
            continue;  // a zero-mass cell blocks this method; others may stand
        }
        result.evaluated.push_back({m, b});
        if (first) {
            acc = b;
            result.method_lower = result.method_upper = m;
            first = false;
            continue;
        }
        if (b.lower >= acc.lower) {
            acc.lower = b.lower;
            acc.binding_lower = b.binding_lower;
            result.method_lower = m;
        }
        if (b.upper <= acc.upper) {
            acc.upper = b.upper;
            acc.binding_upper = b.binding_upper;
            result.method_upper = m;
        }
    }
    if (first)
        throw IneligibleMethodError(
            "every candidate method was blocked by zero-mass conditioning cells");
    if (acc.lower > acc.upper + kCrossTol)
        throw IncoherentDataError("eligible intervals have an empty intersection");
    if (acc.lower > acc.upper) acc.lower = acc.upper;
    result.interval = acc;
    return result;
}

} // namespace poc
