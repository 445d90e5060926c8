#include "pocbounds/json_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace poc {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
}

const json& need(const json& j, const char* key, const char* where) {
    const auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(where) + " is missing '" + key + "'");
    return *it;
}

std::string as_string(const json& j, const char* what) {
    if (!j.is_string())
        throw std::invalid_argument(std::string(what) + " must be a string");
    return j.get<std::string>();
}

double as_number(const json& j, const char* what) {
    if (!j.is_number())
        throw std::invalid_argument(std::string(what) + " must be a number");
    return j.get<double>();
}

std::vector<double> as_number_array(const json& j, const char* what) {
    if (!j.is_array())
        throw std::invalid_argument(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_number(v, what));
    return out;
}

std::vector<std::pair<std::string, std::string>> as_pairs(const json& j,
                                                          const char* what) {
    if (!j.is_array())
        throw std::invalid_argument(std::string(what) + " must be an array of pairs");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument(std::string(what) +
                                        " entries must be two-element arrays");
        out.emplace_back(as_string(e[0], what), as_string(e[1], what));
    }
    return out;
}

int as_card(const json& j, const char* what) {
    if (!j.is_number_integer())
        throw std::invalid_argument(std::string(what) + " must be an integer");
    return j.get<int>();
}

CausalDiagram diagram_from(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("diagram must be an object");
    const json& jn = need(j, "nodes", "diagram");
    if (!jn.is_array()) throw std::invalid_argument("diagram nodes must be an array");
    std::vector<NodeSpec> nodes;
    for (const auto& n : jn) {
        if (!n.is_object())
            throw std::invalid_argument("each node must be a {name, card} object");
        NodeSpec spec;
        spec.name = as_string(need(n, "name", "node"), "node name");
        if (n.contains("card")) spec.card = as_card(n["card"], "node card");
        nodes.push_back(std::move(spec));
    }
    std::vector<std::pair<std::string, std::string>> edges, latents;
    if (j.contains("edges")) edges = as_pairs(j["edges"], "edges");
    if (j.contains("latents")) latents = as_pairs(j["latents"], "latents");
    return CausalDiagram(std::move(nodes), std::move(edges), std::move(latents),
                         as_string(need(j, "treatment", "diagram"), "treatment"),
                         as_string(need(j, "outcome", "diagram"), "outcome"));
}

ObservationalTable observational_from(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("observational table must be an object");
    const json& jv = need(j, "variables", "observational table");
    if (!jv.is_array())
        throw std::invalid_argument("observational variables must be an array");
    std::vector<Variable> vars;
    for (const auto& v : jv) {
        if (!v.is_object())
            throw std::invalid_argument("each variable must be a {name, card} object");
        Variable var;
        var.name = as_string(need(v, "name", "variable"), "variable name");
        if (v.contains("card")) var.card = as_card(v["card"], "variable card");
        vars.push_back(std::move(var));
    }
    const bool has_counts = j.contains("counts");
    const bool has_probs = j.contains("probabilities");
    if (has_counts == has_probs)
        throw std::invalid_argument("observational table needs exactly one of "
                                    "'counts' and 'probabilities'");
    std::vector<double> cells =
        as_number_array(j[has_counts ? "counts" : "probabilities"],
                        has_counts ? "counts" : "probabilities");
    return has_counts
               ? ObservationalTable::from_counts(std::move(vars), std::move(cells))
               : ObservationalTable::from_probabilities(std::move(vars),
                                                        std::move(cells));
}

ExperimentalTable experimental_from(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("experimental table must be an object");
    ExperimentalTable out;
    if (j.contains("strata")) {
        const json& js = j["strata"];
        if (!js.is_array())
            throw std::invalid_argument("experimental strata must be an array");
        for (const auto& s : js) {
            if (!s.is_object())
                throw std::invalid_argument("each stratum must be an object");
            ExperimentalStratum st;
            st.label = as_string(need(s, "label", "stratum"), "stratum label");
            st.p_z = as_number(need(s, "p_z", "stratum"), "p_z");
            st.p_y_do_x = as_number(need(s, "p_y_do_x", "stratum"), "p_y_do_x");
            st.p_y_do_xp =
                as_number(need(s, "p_y_do_xprime", "stratum"), "p_y_do_xprime");
            out.strata.push_back(std::move(st));
        }
    }
    const bool has_x = j.contains("p_y_do_x");
    const bool has_xp = j.contains("p_y_do_xprime");
    if (has_x != has_xp)
        throw std::invalid_argument(
            "experimental table needs both aggregate rates or neither");
    if (has_x) {
        out.p_y_do_x = as_number(j["p_y_do_x"], "p_y_do_x");
        out.p_y_do_xp = as_number(j["p_y_do_xprime"], "p_y_do_xprime");
    } else if (!out.strata.empty()) {
        KahanSum a1, a0;
        for (const auto& s : out.strata) {
            a1.add(s.p_z * s.p_y_do_x);
            a0.add(s.p_z * s.p_y_do_xp);
        }
        out.p_y_do_x = a1.value();
        out.p_y_do_xp = a0.value();
    } else {
        throw std::invalid_argument(
            "experimental table needs aggregate rates or strata");
    }
    out.validate();
    return out;
}

MediatorTables mediator_from(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("mediator tables must be an object");
    MediatorTables med;
    const bool has_z = j.contains("p_y_given_z");
    const bool has_zx = j.contains("p_y_given_zx");
    if (has_z == has_zx)
        throw std::invalid_argument("mediator tables need exactly one of "
                                    "'p_y_given_z' and 'p_y_given_zx'");
    if (has_z) {
        med.p_y_given_z = as_number_array(j["p_y_given_z"], "p_y_given_z");
    } else {
        const json& rows = j["p_y_given_zx"];
        if (!rows.is_array())
            throw std::invalid_argument("p_y_given_zx must be an array of pairs");
        std::vector<std::array<double, 2>> v;
        for (const auto& r : rows) {
            if (!r.is_array() || r.size() != 2)
                throw std::invalid_argument(
                    "p_y_given_zx rows must be [at x', at x] pairs");
            v.push_back({as_number(r[0], "p_y_given_zx"),
                         as_number(r[1], "p_y_given_zx")});
        }
        med.p_y_given_zx = std::move(v);
    }
    med.p_z_do_x =
        as_number_array(need(j, "p_z_do_x", "mediator tables"), "p_z_do_x");
    med.p_z_do_xp =
        as_number_array(need(j, "p_z_do_xprime", "mediator tables"), "p_z_do_xprime");
    med.validate();
    return med;
}

json flag_json(const TheoremFlag& f) {
    return json{{"eligible", f.eligible}, {"justification", f.justification}};
}

} // namespace

CausalDiagram diagram_from_json(const std::string& text) {
    return diagram_from(parse(text));
}

ObservationalTable observational_from_json(const std::string& text) {
    return observational_from(parse(text));
}

ExperimentalTable experimental_from_json(const std::string& text) {
    return experimental_from(parse(text));
}

MediatorTables mediator_from_json(const std::string& text) {
    return mediator_from(parse(text));
}

Problem problem_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw std::invalid_argument("problem must be an object");
    Problem p{diagram_from(need(j, "diagram", "problem")), std::nullopt, std::nullopt,
              std::nullopt, {}};
    if (j.contains("observational")) p.observational = observational_from(j["observational"]);
    if (j.contains("experimental")) p.experimental = experimental_from(j["experimental"]);
    if (j.contains("mediator")) p.mediator = mediator_from(j["mediator"]);
    if (j.contains("covariates")) {
        const json& jc = j["covariates"];
        if (!jc.is_array())
            throw std::invalid_argument("covariates must be an array of names");
        for (const auto& c : jc) p.covariates.push_back(as_string(c, "covariate"));
    }
    return p;
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return problem_from_json(ss.str());
}

Query query_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw std::invalid_argument("query must be an object");
    Query q;
    if (j.contains("estimand"))
        q.estimand = estimand_from_string(as_string(j["estimand"], "estimand"));
    if (j.contains("method"))
        q.method = method_from_string(as_string(j["method"], "method"));
    if (j.contains("stratum")) q.stratum = as_string(j["stratum"], "stratum");
    return q;
}

namespace {

// Printed numbers are uniformly 4 d.p.; JSON output matches the text output.
double round4(double v) { return std::round(v * 1e4) / 1e4; }

} // namespace

std::string result_to_json(const ComputeResult& r) {
    json evaluated = json::array();
    for (const auto& mr : r.evaluated)
        evaluated.push_back(json{{"method", to_string(mr.method)},
                                 {"lower", round4(mr.interval.lower)},
                                 {"upper", round4(mr.interval.upper)},
                                 {"binding_lower", mr.interval.binding_lower},
                                 {"binding_upper", mr.interval.binding_upper}});
    const json out{
        {"estimand", to_string(r.estimand)},
        {"method", to_string(r.method)},
        {"lower", round4(r.interval.lower)},
        {"upper", round4(r.interval.upper)},
        {"binding_lower", r.interval.binding_lower},
        {"binding_upper", r.interval.binding_upper},
        {"method_lower", to_string(r.method_lower)},
        {"method_upper", to_string(r.method_upper)},
        {"experimental_derived", r.experimental_derived},
        {"eligibility",
         json{{"thm1", flag_json(r.eligibility.thm1_nondescendant)},
              {"thm2", flag_json(r.eligibility.thm2_backdoor)},
              {"thm3", flag_json(r.eligibility.thm3_partial_mediator)},
              {"thm4", flag_json(r.eligibility.thm4_pure_mediator)}}},
        {"evaluated", std::move(evaluated)},
    };
    return out.dump(2);
}

std::string result_to_text(const ComputeResult& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << to_string(r.estimand) << " bounds [" << r.interval.lower << ", "
       << r.interval.upper << "] via " << to_string(r.method) << "\n";
    os << "  lower " << r.interval.lower << " (" << r.interval.binding_lower
       << ", " << to_string(r.method_lower) << ")\n";
    os << "  upper " << r.interval.upper << " (" << r.interval.binding_upper
       << ", " << to_string(r.method_upper) << ")\n";
    os << "  experimental rates: "
       << (r.experimental_derived ? "reconstructed from the supplied tables"
                                  : "as supplied")
       << "\n";
    const auto line = [&](const char* name, const TheoremFlag& f) {
        os << "  " << name << ": " << (f.eligible ? "eligible" : "ineligible")
           << " - " << f.justification << "\n";
    };
    line("thm1", r.eligibility.thm1_nondescendant);
    line("thm2", r.eligibility.thm2_backdoor);
    line("thm3", r.eligibility.thm3_partial_mediator);
    line("thm4", r.eligibility.thm4_pure_mediator);
    for (const auto& mr : r.evaluated)
        os << "  " << to_string(mr.method) << " [" << mr.interval.lower << ", "
           << mr.interval.upper << "]\n";
    return os.str();
}

} // namespace poc
