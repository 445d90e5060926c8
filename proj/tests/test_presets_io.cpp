#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "pocbounds/bounds.hpp"
#include "pocbounds/errors.hpp"
#include "pocbounds/json_io.hpp"
#include "pocbounds/presets.hpp"

using namespace poc;

namespace {
std::string data_path(const char* name) {
    return std::string(POCBOUNDS_DATA_DIR) + "/" + name;
}

void check_same_result(const Problem& a, const Problem& b, const Query& q = {}) {
    const ComputeResult ra = compute(a, q);
    const ComputeResult rb = compute(b, q);
    CHECK(std::abs(ra.interval.lower - rb.interval.lower) <= 1e-12);
    CHECK(std::abs(ra.interval.upper - rb.interval.upper) <= 1e-12);
    CHECK(ra.method_lower == rb.method_lower);
    CHECK(ra.method_upper == rb.method_upper);
    CHECK(ra.evaluated.size() == rb.evaluated.size());
}
} // namespace

TEST_CASE("the bundled data files reproduce the programmatic presets") {
    check_same_result(load_problem(data_path("drug.json")), drug_problem());
    check_same_result(load_problem(data_path("inflammation.json")),
                      inflammation_problem());
    check_same_result(load_problem(data_path("ancestry.json")), ancestry_problem());
    check_same_result(load_problem(data_path("cointoss.json")), cointoss_problem());

    // Strata survive the round trip too.
    check_same_result(load_problem(data_path("ancestry.json")), ancestry_problem(),
                      {Estimand::PNS, Method::Conditional, "z"});
}

TEST_CASE("diagram json round-trips structure and validation") {
    const CausalDiagram g = diagram_from_json(R"({
        "nodes": [{"name": "Z", "card": 3}, {"name": "X"}, {"name": "Y"}],
        "edges": [["Z", "X"], ["Z", "Y"], ["X", "Y"]],
        "latents": [["Z", "Y"]],
        "treatment": "X", "outcome": "Y"})");
    CHECK(g.node_count() == 3);
    CHECK(g.cardinality(g.index_of("Z")) == 3);
    CHECK(g.treatment() == "X");

    CHECK_THROWS_AS(diagram_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(diagram_from_json("[1,2]"), std::invalid_argument);
    CHECK_THROWS_AS(diagram_from_json(R"({"nodes": [], "treatment": "X",
        "outcome": "Y"})"), std::invalid_argument);
    CHECK_THROWS_AS(diagram_from_json(R"({"nodes": [{"name": "X"}],
        "outcome": "Y"})"), std::invalid_argument);  // treatment missing
    CHECK_THROWS_AS(diagram_from_json(R"({
        "nodes": [{"name": "X", "card": 2.5}, {"name": "Y"}],
        "treatment": "X", "outcome": "Y"})"), std::invalid_argument);
}

TEST_CASE("observational json accepts exactly one of counts or probabilities") {
    const ObservationalTable t = observational_from_json(R"({
        "variables": [{"name": "X"}, {"name": "Y"}],
        "counts": [10, 30, 20, 40]})");
    CHECK(std::abs(t.mass({{"X", 1}, {"Y", 1}}) - 0.4) <= 1e-12);

    CHECK_THROWS_AS(observational_from_json(R"({
        "variables": [{"name": "X"}, {"name": "Y"}],
        "counts": [1, 2, 3, 4], "probabilities": [0.25, 0.25, 0.25, 0.25]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(observational_from_json(R"({
        "variables": [{"name": "X"}, {"name": "Y"}]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(observational_from_json(R"({
        "variables": [{"name": "X"}, {"name": "Y"}],
        "counts": [1, 2, 3]})"), std::invalid_argument);
}

TEST_CASE("experimental json derives aggregates from strata") {
    const ExperimentalTable e = experimental_from_json(R"({
        "strata": [
            {"label": "a", "p_z": 0.25, "p_y_do_x": 1.0, "p_y_do_xprime": 0.0},
            {"label": "b", "p_z": 0.75, "p_y_do_x": 0.2, "p_y_do_xprime": 0.4}]})");
    CHECK(std::abs(e.p_y_do_x - 0.4) <= 1e-12);
    CHECK(std::abs(e.p_y_do_xp - 0.3) <= 1e-12);

    // Supplied aggregates that contradict the strata mixture are rejected.
    CHECK_THROWS_AS(experimental_from_json(R"({
        "p_y_do_x": 0.9, "p_y_do_xprime": 0.3,
        "strata": [
            {"label": "a", "p_z": 0.25, "p_y_do_x": 1.0, "p_y_do_xprime": 0.0},
            {"label": "b", "p_z": 0.75, "p_y_do_x": 0.2, "p_y_do_xprime": 0.4}]})"),
        IncoherentDataError);
    CHECK_THROWS_AS(experimental_from_json("{}"), std::invalid_argument);
}

TEST_CASE("mediator json wants exactly one conditional table") {
    const MediatorTables m = mediator_from_json(R"({
        "p_y_given_zx": [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]],
        "p_z_do_x": [0.2, 0.3, 0.5], "p_z_do_xprime": [0.5, 0.3, 0.2]})");
    CHECK(m.z_card() == 3);
    REQUIRE(m.p_y_given_zx.has_value());
    CHECK((*m.p_y_given_zx)[1][0] == doctest::Approx(0.3));

    CHECK_THROWS_AS(mediator_from_json(R"({
        "p_y_given_z": [0.5, 0.5], "p_y_given_zx": [[0.1, 0.2], [0.3, 0.4]],
        "p_z_do_x": [0.5, 0.5], "p_z_do_xprime": [0.5, 0.5]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(mediator_from_json(R"({
        "p_z_do_x": [0.5, 0.5], "p_z_do_xprime": [0.5, 0.5]})"),
        std::invalid_argument);
}

TEST_CASE("unknown covariate names surface when the problem is computed") {
    const Problem p = problem_from_json(R"({
        "diagram": {"nodes": [{"name": "X"}, {"name": "Y"}],
                    "edges": [["X", "Y"]], "treatment": "X", "outcome": "Y"},
        "experimental": {"p_y_do_x": 0.6, "p_y_do_xprime": 0.4},
        "covariates": ["Q"]})");
    CHECK_THROWS_AS(compute(p, {}), std::invalid_argument);
    CHECK_THROWS_AS(load_problem("/nonexistent/nowhere.json"), std::invalid_argument);
}

TEST_CASE("query json fills defaults and rejects junk") {
    const Query q = query_from_json(R"({"estimand": "pn", "method": "thm2"})");
    CHECK(q.estimand == Estimand::PN);
    CHECK(q.method == Method::Thm2);
    CHECK_FALSE(q.stratum.has_value());

    const Query d = query_from_json("{}");
    CHECK(d.estimand == Estimand::PNS);
    CHECK(d.method == Method::Auto);

    CHECK_THROWS_AS(query_from_json(R"({"estimand": "pnx"})"), std::invalid_argument);
    CHECK_THROWS_AS(query_from_json(R"({"method": "thm9"})"), std::invalid_argument);
    CHECK_THROWS_AS(query_from_json(R"({"stratum": 3})"), std::invalid_argument);
}

TEST_CASE("result reports carry rounded values and binding provenance") {
    const ComputeResult r = compute(drug_problem(), {});
    const std::string js = result_to_json(r);
    const nlohmann::json j = nlohmann::json::parse(js);
    CHECK(j["estimand"] == "pns");
    CHECK(j["method"] == "auto");
    CHECK(std::abs(j["lower"].get<double>() - 0.0) <= 5e-5);
    CHECK(std::abs(j["upper"].get<double>() - 0.0146) <= 5e-5);
    CHECK(j["method_upper"] == "thm2");
    CHECK(j["experimental_derived"] == true);
    REQUIRE(j["evaluated"].is_array());
    REQUIRE(j["evaluated"].size() == 2);
    CHECK(j["evaluated"][0]["method"] == "tian_pearl");
    CHECK(std::abs(j["evaluated"][0]["upper"].get<double>() - 0.2969) <= 5e-5);

    const std::string text = result_to_text(r);
    CHECK(text.find("0.0146") != std::string::npos);
    CHECK(text.find("thm2") != std::string::npos);
}
