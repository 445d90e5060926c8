#include "pocbounds/tables.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "pocbounds/errors.hpp"

namespace poc {

namespace {

constexpr double kNormTol = 1e-9;
constexpr double kCoherenceTol = 1e-6;

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(what + " = " + std::to_string(p) +
                                    " is not a probability");
}

} // namespace

ObservationalTable::ObservationalTable(std::vector<Variable> vars, std::vector<double> cells)
    : vars_(std::move(vars)), cells_(std::move(cells)) {
    if (vars_.empty()) throw std::invalid_argument("table has no variables");
    std::set<std::string> names;
    std::size_t expected = 1;
    for (const auto& v : vars_) {
        if (v.card < 2)
            throw std::invalid_argument("variable '" + v.name + "' has cardinality " +
                                        std::to_string(v.card));
        if (!names.insert(v.name).second)
            throw std::invalid_argument("duplicate variable '" + v.name + "'");
        expected *= static_cast<std::size_t>(v.card);
    }
    if (cells_.size() != expected)
        throw std::invalid_argument("expected " + std::to_string(expected) +
                                    " cells, got " + std::to_string(cells_.size()));
    strides_.assign(vars_.size(), 1);
    for (int i = static_cast<int>(vars_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * static_cast<std::size_t>(vars_[i + 1].card);
}

ObservationalTable ObservationalTable::from_probabilities(std::vector<Variable> vars,
                                                          std::vector<double> cells) {
    ObservationalTable t(std::move(vars), std::move(cells));
    KahanSum total;
    for (double c : t.cells_) {
        check_probability(c, "cell");
        total.add(c);
    }
    const double sum = total.value();
    if (std::abs(sum - 1.0) > kNormTol)
        throw std::invalid_argument("cells sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-9");
    for (double& c : t.cells_) c /= sum;
    return t;
}

ObservationalTable ObservationalTable::from_counts(std::vector<Variable> vars,
                                                   std::vector<double> counts) {
    ObservationalTable t(std::move(vars), std::move(counts));
    KahanSum total;
    for (double c : t.cells_) {
        if (!(c >= 0.0))
            throw std::invalid_argument("negative count " + std::to_string(c));
        total.add(c);
    }
    const double sum = total.value();
    if (!(sum > 0.0)) throw std::invalid_argument("counts sum to zero");
    for (double& c : t.cells_) c /= sum;
    return t;
}

bool ObservationalTable::has_variable(const std::string& name) const {
    for (const auto& v : vars_)
        if (v.name == name) return true;
    return false;
}

int ObservationalTable::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown variable '" + name + "'");
}

void ObservationalTable::decode(std::size_t flat, std::vector<int>& values) const {
    values.resize(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        values[i] = static_cast<int>(flat / strides_[i]);
        flat %= strides_[i];
    }
}

double ObservationalTable::mass(const Assignment& a) const {
    std::vector<int> fixed(vars_.size(), -1);
    for (const auto& [name, value] : a) {
        const int i = index_of(name);
        if (fixed[i] != -1)
            throw std::invalid_argument("variable '" + name + "' assigned twice");
        if (value < 0 || value >= vars_[i].card)
            throw std::invalid_argument("value " + std::to_string(value) +
                                        " out of range for '" + name + "'");
        fixed[i] = value;
    }
    KahanSum total;
    std::vector<int> values;
    for (std::size_t flat = 0; flat < cells_.size(); ++flat) {
        decode(flat, values);
        bool match = true;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (fixed[i] != -1 && values[i] != fixed[i]) {
                match = false;
                break;
            }
        }
        if (match) total.add(cells_[flat]);
    }
    return total.value();
}

ObservationalTable ObservationalTable::marginal(const std::vector<std::string>& keep) const {
    std::set<int> keep_idx;
    for (const auto& name : keep)
        if (!keep_idx.insert(index_of(name)).second)
            throw std::invalid_argument("variable '" + name + "' listed twice");
    if (keep_idx.empty()) throw std::invalid_argument("marginal over no variables");

    std::vector<Variable> vars;
    std::vector<std::size_t> strides;
    std::size_t cell_total = 1;
    for (int i : keep_idx) {
        vars.push_back(vars_[i]);
        cell_total *= static_cast<std::size_t>(vars_[i].card);
    }
    strides.assign(vars.size(), 1);
    for (int i = static_cast<int>(vars.size()) - 2; i >= 0; --i)
        strides[i] = strides[i + 1] * static_cast<std::size_t>(vars[i + 1].card);

    std::vector<KahanSum> acc(cell_total);
    std::vector<int> values;
    for (std::size_t flat = 0; flat < cells_.size(); ++flat) {
        decode(flat, values);
        std::size_t out = 0;
        std::size_t k = 0;
        for (int i : keep_idx) out += static_cast<std::size_t>(values[i]) * strides[k++];
        acc[out].add(cells_[flat]);
    }
    std::vector<double> cells(cell_total);
    for (std::size_t i = 0; i < cell_total; ++i) cells[i] = acc[i].value();
    return ObservationalTable(std::move(vars), std::move(cells));
}

ObservationalTable ObservationalTable::conditional(const std::vector<std::string>& target,
                                                   const Assignment& given) const {
    std::set<std::string> given_names;
    for (const auto& [name, value] : given) {
        index_of(name);
        (void)value;
        given_names.insert(name);
    }
    for (const auto& name : target)
        if (given_names.count(name))
            throw std::invalid_argument("'" + name + "' is both target and condition");

    const double denom = mass(given);
    if (!(denom > 0.0))
        throw UndefinedEstimandError("conditioning event has zero probability");

    std::vector<std::string> keep(target);
    for (const auto& name : given_names) keep.push_back(name);
    const ObservationalTable joint = marginal(keep);

    std::set<int> target_idx;
    for (const auto& name : target) target_idx.insert(joint.index_of(name));

    std::vector<Variable> vars;
    std::size_t cell_total = 1;
    for (int i : target_idx) {
        vars.push_back(joint.vars_[i]);
        cell_total *= static_cast<std::size_t>(joint.vars_[i].card);
    }
    std::vector<std::size_t> strides(vars.size(), 1);
    for (int i = static_cast<int>(vars.size()) - 2; i >= 0; --i)
        strides[i] = strides[i + 1] * static_cast<std::size_t>(vars[i + 1].card);

    std::vector<int> fixed(joint.vars_.size(), -1);
    for (const auto& [name, value] : given) fixed[joint.index_of(name)] = value;

    std::vector<KahanSum> acc(cell_total);
    std::vector<int> values;
    for (std::size_t flat = 0; flat < joint.cells_.size(); ++flat) {
        joint.decode(flat, values);
        bool match = true;
        for (std::size_t i = 0; i < joint.vars_.size(); ++i) {
            if (fixed[i] != -1 && values[i] != fixed[i]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        std::size_t out = 0;
        std::size_t k = 0;
        for (int i : target_idx) out += static_cast<std::size_t>(values[i]) * strides[k++];
        acc[out].add(joint.cells_[flat]);
    }
    std::vector<double> cells(cell_total);
    for (std::size_t i = 0; i < cell_total; ++i) cells[i] = acc[i].value() / denom;
    return ObservationalTable(std::move(vars), std::move(cells));
}

ObsMarginals ObsMarginals::from_table(const ObservationalTable& t,
                                      const std::string& x_name,
                                      const std::string& y_name) {
    ObsMarginals m;
    m.xy = t.mass({{x_name, 1}, {y_name, 1}});
    m.xyp = t.mass({{x_name, 1}, {y_name, 0}});
    m.xpy = t.mass({{x_name, 0}, {y_name, 1}});
    m.xpyp = t.mass({{x_name, 0}, {y_name, 0}});
    m.validate();
    return m;
}

void ObsMarginals::validate() const {
    check_probability(xy, "P(x,y)");
    check_probability(xyp, "P(x,y')");
    check_probability(xpy, "P(x',y)");
    check_probability(xpyp, "P(x',y')");
    const double sum = xy + xyp + xpy + xpyp;
    if (std::abs(sum - 1.0) > kNormTol)
        throw std::invalid_argument("joint (x,y) cells sum to " + std::to_string(sum));
}

void ExperimentalTable::validate() const {
    check_probability(p_y_do_x, "P(y|do(x))");
    check_probability(p_y_do_xp, "P(y|do(x'))");
    if (strata.empty()) return;
    KahanSum weight, mix_x, mix_xp;
    for (const auto& s : strata) {
        check_probability(s.p_z, "P(z) of stratum '" + s.label + "'");
        check_probability(s.p_y_do_x, "P(y|do(x),z) of stratum '" + s.label + "'");
        check_probability(s.p_y_do_xp, "P(y|do(x'),z) of stratum '" + s.label + "'");
        weight.add(s.p_z);
        mix_x.add(s.p_z * s.p_y_do_x);
        mix_xp.add(s.p_z * s.p_y_do_xp);
    }
    if (std::abs(weight.value() - 1.0) > kNormTol)
        throw std::invalid_argument("stratum weights sum to " +
                                    std::to_string(weight.value()));
    // Law of total probability between strata and aggregates.
    if (std::abs(mix_x.value() - p_y_do_x) > kNormTol ||
        std::abs(mix_xp.value() - p_y_do_xp) > kNormTol)
        throw IncoherentDataError(
            "strata do not mix back to the aggregate experimental rates");
}

void MediatorTables::validate() const {
    if (p_y_given_z.has_value() == p_y_given_zx.has_value())
        throw std::invalid_argument(
            "mediator tables need exactly one of P(y|z), P(y|z,x)");
    const int k = z_card();
    if (k < 1) throw std::invalid_argument("mediator variable has no states");
    if (static_cast<int>(p_z_do_xp.size()) != k)
        throw std::invalid_argument("mediator state counts disagree across arms");
    KahanSum wx, wxp;
    for (int z = 0; z < k; ++z) {
        check_probability(p_z_do_x[z], "P(z|do(x))");
        check_probability(p_z_do_xp[z], "P(z|do(x'))");
        wx.add(p_z_do_x[z]);
        wxp.add(p_z_do_xp[z]);
    }
    if (std::abs(wx.value() - 1.0) > kNormTol || std::abs(wxp.value() - 1.0) > kNormTol)
        throw std::invalid_argument("mediator arm distributions must sum to 1");
    if (p_y_given_z) {
        if (static_cast<int>(p_y_given_z->size()) != k)
            throw std::invalid_argument("P(y|z) has wrong state count");
        for (double p : *p_y_given_z) check_probability(p, "P(y|z)");
    } else {
        if (static_cast<int>(p_y_given_zx->size()) != k)
            throw std::invalid_argument("P(y|z,x) has wrong state count");
        for (const auto& row : *p_y_given_zx) {
            check_probability(row[0], "P(y|z,x')");
            check_probability(row[1], "P(y|z,x)");
        }
    }
}

std::vector<std::string> coherence_violations(const ExperimentalTable& exp,
                                              const ObsMarginals& obs) {
    std::vector<std::string> out;
    const auto check_arm = [&out](double p_do, double joint, double other_arm,
                                  const char* arm) {
        if (p_do < joint - kCoherenceTol)
            out.push_back(std::string("P(y|do(") + arm + ")) < P(" + arm + ",y)");
        if (p_do > joint + other_arm + kCoherenceTol)
            out.push_back(std::string("P(y|do(") + arm + ")) > P(" + arm +
                          ",y) + P(other arm)");
    };
    check_arm(exp.p_y_do_x, obs.xy, obs.xpy + obs.xpyp, "x");
    check_arm(exp.p_y_do_xp, obs.xpy, obs.xy + obs.xyp, "x'");
    return out;
}

void require_coherent(const ExperimentalTable& exp, const ObsMarginals& obs) {
    const auto violations = coherence_violations(exp, obs);
    if (violations.empty()) return;
    std::string msg = "experimental and observational tables disagree:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw IncoherentDataError(msg);
}

ExperimentalTable adjustment_formula(const ObservationalTable& t,
                                     const std::vector<std::string>& z,
                                     const std::string& x_name,
                                     const std::string& y_name) {
    if (z.empty()) throw std::invalid_argument("adjustment needs a covariate set");
    std::set<std::string> seen{x_name, y_name};
    for (const auto& name : z) {
        t.index_of(name);
        if (!seen.insert(name).second)
            throw std::invalid_argument("covariate '" + name +
                                        "' repeats or clashes with treatment/outcome");
    }

    std::vector<int> cards;
    for (const auto& name : z) cards.push_back(t.variables()[t.index_of(name)].card);
    std::size_t configs = 1;
    for (int c : cards) configs *= static_cast<std::size_t>(c);

    ExperimentalTable out;
    KahanSum agg_x, agg_xp;
    std::vector<int> values(z.size());
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
        std::size_t rest = cfg;
        for (int i = static_cast<int>(z.size()) - 1; i >= 0; --i) {
            values[i] = static_cast<int>(rest % static_cast<std::size_t>(cards[i]));
            rest /= static_cast<std::size_t>(cards[i]);
        }
        Assignment z_assign;
        std::string label;
        for (std::size_t i = 0; i < z.size(); ++i) {
            z_assign.emplace_back(z[i], values[i]);
            if (!label.empty()) label += ",";
            label += z[i] + "=" + std::to_string(values[i]);
        }
        const double p_z = t.mass(z_assign);
        if (p_z == 0.0) continue;  // zero-weight strata contribute nothing

        Assignment with_x = z_assign, with_xp = z_assign;
        with_x.emplace_back(x_name, 1);
        with_xp.emplace_back(x_name, 0);
        const double p_zx = t.mass(with_x);
        const double p_zxp = t.mass(with_xp);
        if (p_zx == 0.0 || p_zxp == 0.0)
            throw UndefinedEstimandError("stratum " + label + " has a zero-mass " +
                                         x_name + " arm; P(y|" + x_name +
                                         ",z) is undefined");
        Assignment with_xy = with_x, with_xpy = with_xp;
        with_xy.emplace_back(y_name, 1);
        with_xpy.emplace_back(y_name, 1);

        ExperimentalStratum s;
        s.label = label;
        s.p_z = p_z;
        s.p_y_do_x = t.mass(with_xy) / p_zx;
        s.p_y_do_xp = t.mass(with_xpy) / p_zxp;
        out.strata.push_back(s);
        agg_x.add(s.p_z * s.p_y_do_x);
        agg_xp.add(s.p_z * s.p_y_do_xp);
    }
    out.p_y_do_x = agg_x.value();
    out.p_y_do_xp = agg_xp.value();
    out.validate();
    return out;
}

} // namespace poc
