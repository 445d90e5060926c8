#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "pocbounds/errors.hpp"
#include "pocbounds/presets.hpp"
#include "pocbounds/tables.hpp"

using namespace poc;

namespace {

ObservationalTable drug_table() {
    return ObservationalTable::from_counts(
        {{"Z", 2}, {"X", 2}, {"Y", 2}},
        {2, 114, 41, 313, 107, 13, 109, 1});
}

} // namespace

TEST_CASE("construction validates shape and mass") {
    CHECK_THROWS_AS(ObservationalTable::from_probabilities({}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        ObservationalTable::from_probabilities({{"X", 2}}, {0.5, 0.25, 0.25}),
        std::invalid_argument);
    CHECK_THROWS_AS(ObservationalTable::from_probabilities({{"X", 2}}, {0.7, 0.2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ObservationalTable::from_probabilities({{"X", 2}}, {1.1, -0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ObservationalTable::from_counts({{"X", 2}}, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        ObservationalTable::from_probabilities({{"X", 2}, {"X", 2}}, {0.25, 0.25, 0.25, 0.25}),
        std::invalid_argument);
    CHECK_THROWS_AS(ObservationalTable::from_probabilities({{"X", 1}}, {1.0}),
                    std::invalid_argument);

    // Counts normalize to unit mass.
    const ObservationalTable t = drug_table();
    double sum = 0.0;
    for (std::size_t i = 0; i < t.cell_count(); ++i) sum += t.cell(i);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mass, marginal and conditional reproduce the drug-count quantities") {
    const ObservationalTable t = drug_table();
    CHECK(t.mass({{"X", 1}, {"Y", 1}}) == doctest::Approx(314.0 / 700).epsilon(1e-12));
    CHECK(t.mass({{"Y", 1}}) == doctest::Approx(441.0 / 700).epsilon(1e-12));
    CHECK(t.mass({{"Z", 0}}) == doctest::Approx(470.0 / 700).epsilon(1e-12));
    CHECK(t.mass({}) == doctest::Approx(1.0).epsilon(1e-12));

    // P(y | x, men) = 313/354, P(y | x) = 314/464.
    const ObservationalTable c1 = t.conditional({"Y"}, {{"Z", 0}, {"X", 1}});
    CHECK(c1.mass({{"Y", 1}}) == doctest::Approx(313.0 / 354).epsilon(1e-12));
    const ObservationalTable c2 = t.conditional({"Y"}, {{"X", 1}});
    CHECK(c2.mass({{"Y", 1}}) == doctest::Approx(314.0 / 464).epsilon(1e-12));

    // Marginal keeps original variable order regardless of request order.
    const ObservationalTable m = t.marginal({"Y", "Z"});
    CHECK(m.variables()[0].name == "Z");
    CHECK(m.variables()[1].name == "Y");
    CHECK(m.mass({{"Z", 1}, {"Y", 0}}) == doctest::Approx(216.0 / 700).epsilon(1e-12));

    CHECK_THROWS_AS(t.mass({{"W", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(t.mass({{"X", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(t.mass({{"X", 1}, {"X", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(t.marginal({}), std::invalid_argument);
}

TEST_CASE("conditioning on a zero-mass event is an undefined estimand") {
    const ObservationalTable t = ObservationalTable::from_probabilities(
        {{"X", 2}, {"Y", 2}}, {0.5, 0.5, 0.0, 0.0});
    CHECK_THROWS_AS(t.conditional({"Y"}, {{"X", 1}}), UndefinedEstimandError);
}

TEST_CASE("obs marginals extract the four joint cells") {
    const ObsMarginals m = ObsMarginals::from_table(drug_table(), "X", "Y");
    CHECK(m.xy == doctest::Approx(314.0 / 700).epsilon(1e-12));
    CHECK(m.xyp == doctest::Approx(150.0 / 700).epsilon(1e-12));
    CHECK(m.xpy == doctest::Approx(127.0 / 700).epsilon(1e-12));
    CHECK(m.xpyp == doctest::Approx(109.0 / 700).epsilon(1e-12));
    CHECK(m.y() == doctest::Approx(441.0 / 700).epsilon(1e-12));
    CHECK(m.x() == doctest::Approx(464.0 / 700).epsilon(1e-12));
    m.validate();

    ObsMarginals bad = m;
    bad.xy = 0.9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("experimental tables validate rates, weights and the mixture law") {
    ExperimentalTable e;
    e.p_y_do_x = 0.5;
    e.p_y_do_xp = 0.4;
    e.strata = {{"z", 0.5, 0.75, 0.2}, {"z'", 0.5, 0.25, 0.6}};
    CHECK_NOTHROW(e.validate());

    ExperimentalTable bad_rate = e;
    bad_rate.p_y_do_x = 1.2;
    CHECK_THROWS_AS(bad_rate.validate(), std::invalid_argument);

    ExperimentalTable bad_weights = e;
    bad_weights.strata[0].p_z = 0.6;  // weights sum to 1.1
    CHECK_THROWS_AS(bad_weights.validate(), std::invalid_argument);

    // Strata must mix back to the aggregates (law of total probability, 1e-9).
    ExperimentalTable bad_mix = e;
    bad_mix.p_y_do_x = 0.51;
    CHECK_THROWS_AS(bad_mix.validate(), IncoherentDataError);
    bad_mix.p_y_do_x = 0.5 + 2e-9;
    CHECK_THROWS_AS(bad_mix.validate(), IncoherentDataError);
    bad_mix.p_y_do_x = 0.5 + 2e-10;
    CHECK_NOTHROW(bad_mix.validate());
}

TEST_CASE("mediator tables validate their distributions") {
    MediatorTables med;
    med.p_y_given_z = {0.5, 0.5};
    med.p_z_do_x = {0.9, 0.1};
    med.p_z_do_xp = {0.9, 0.1};
    CHECK_NOTHROW(med.validate());
    CHECK(med.z_card() == 2);

    MediatorTables unnorm = med;
    unnorm.p_z_do_x = {0.9, 0.2};
    CHECK_THROWS_AS(unnorm.validate(), std::invalid_argument);

    MediatorTables ragged = med;
    ragged.p_z_do_xp = {0.5, 0.3, 0.2};
    CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);

    MediatorTables neither = med;
    neither.p_y_given_z.reset();
    CHECK_THROWS_AS(neither.validate(), std::invalid_argument);

    MediatorTables partial;
    partial.p_y_given_zx = {{0.2, 0.8}, {0.6, 0.4}};
    partial.p_z_do_x = {0.3, 0.7};
    partial.p_z_do_xp = {0.6, 0.4};
    CHECK_NOTHROW(partial.validate());
}

TEST_CASE("cross-table coherence uses the 1e-6 tolerance") {
    const ObsMarginals m = ObsMarginals::from_table(drug_table(), "X", "Y");
    ExperimentalTable e;
    e.p_y_do_x = 0.596652;
    e.p_y_do_xp = 0.695447;
    CHECK(coherence_violations(e, m).empty());
    CHECK_NOTHROW(require_coherent(e, m));

    // P(y|do(x)) below P(x,y) is impossible.
    ExperimentalTable low = e;
    low.p_y_do_x = 314.0 / 700 - 1e-3;
    CHECK_FALSE(coherence_violations(low, m).empty());
    CHECK_THROWS_AS(require_coherent(low, m), IncoherentDataError);

    // Within 1e-6 the discrepancy is tolerated as rounding.
    ExperimentalTable close = e;
    close.p_y_do_x = 314.0 / 700 - 5e-7;
    CHECK(coherence_violations(close, m).empty());

    // P(y|do(x)) above P(x,y) + P(x') is impossible too.
    ExperimentalTable high = e;
    high.p_y_do_x = 314.0 / 700 + 236.0 / 700 + 1e-3;
    CHECK_FALSE(coherence_violations(high, m).empty());
}

TEST_CASE("adjustment formula reproduces the drug experimental rates") {
    const ObservationalTable t = drug_table();
    const ExperimentalTable adj = adjustment_formula(t, {"Z"}, "X", "Y");
    // P(y_x) = 313/354 * 470/700 + 1/110 * 230/700, P(y_x') likewise.
    CHECK(adj.p_y_do_x == doctest::Approx(0.5966517).epsilon(1e-6));
    CHECK(adj.p_y_do_xp == doctest::Approx(0.6954468).epsilon(1e-6));
    REQUIRE(adj.strata.size() == 2);
    CHECK(adj.strata[0].label == "Z=0");
    CHECK(adj.strata[1].label == "Z=1");
    CHECK(adj.strata[0].p_z == doctest::Approx(470.0 / 700).epsilon(1e-12));
    CHECK(adj.strata[0].p_y_do_x == doctest::Approx(313.0 / 354).epsilon(1e-12));
    CHECK(adj.strata[1].p_y_do_xp == doctest::Approx(13.0 / 120).epsilon(1e-12));
    CHECK_NOTHROW(adj.validate());
}

TEST_CASE("adjustment over two covariates enumerates configurations row-major") {
    // Independent Z1, Z2 driving X keeps all arms populated.
    std::vector<double> cells(16);
    for (int z1 = 0; z1 < 2; ++z1)
        for (int z2 = 0; z2 < 2; ++z2)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) {
                    const double pz = (z1 ? 0.3 : 0.7) * (z2 ? 0.4 : 0.6);
                    const double px = x ? 0.5 : 0.5;
                    const double py = y ? (x ? 0.8 : 0.2) : (x ? 0.2 : 0.8);
                    cells[static_cast<std::size_t>(z1 * 8 + z2 * 4 + x * 2 + y)] =
                        pz * px * py;
                }
    const ObservationalTable t = ObservationalTable::from_probabilities(
        {{"Z1", 2}, {"Z2", 2}, {"X", 2}, {"Y", 2}}, cells);
    const ExperimentalTable adj = adjustment_formula(t, {"Z1", "Z2"}, "X", "Y");
    REQUIRE(adj.strata.size() == 4);
    CHECK(adj.strata[0].label == "Z1=0,Z2=0");
    CHECK(adj.strata[1].label == "Z1=0,Z2=1");
    CHECK(adj.strata[2].label == "Z1=1,Z2=0");
    CHECK(adj.strata[3].label == "Z1=1,Z2=1");
    CHECK(adj.p_y_do_x == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(adj.p_y_do_xp == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("adjustment skips zero-mass strata and rejects zero-mass arms") {
    // Z=1 never occurs: stratum skipped, aggregate unaffected.
    const ObservationalTable skip = ObservationalTable::from_probabilities(
        {{"Z", 2}, {"X", 2}, {"Y", 2}},
        {0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0});
    const ExperimentalTable adj = adjustment_formula(skip, {"Z"}, "X", "Y");
    REQUIRE(adj.strata.size() == 1);
    CHECK(adj.strata[0].label == "Z=0");

    // Z=1 occurs but never receives the x arm: undefined estimand.
    const ObservationalTable lost = ObservationalTable::from_probabilities(
        {{"Z", 2}, {"X", 2}, {"Y", 2}},
        {0.2, 0.2, 0.2, 0.2, 0.1, 0.1, 0.0, 0.0});
    CHECK_THROWS_AS(adjustment_formula(lost, {"Z"}, "X", "Y"),
                    UndefinedEstimandError);

    CHECK_THROWS_AS(adjustment_formula(skip, {}, "X", "Y"), std::invalid_argument);
    CHECK_THROWS_AS(adjustment_formula(skip, {"X"}, "X", "Y"), std::invalid_argument);
}

TEST_CASE("kahan summation survives mass cancellation") {
    KahanSum s;
    s.add(1.0);
    for (int i = 0; i < 10; ++i) s.add(1e-17);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-16).epsilon(1e-3));
}
