#include "pocbounds/presets.hpp"

#include <stdexcept>

namespace poc {

CausalDiagram fig1a(int z_card) {
    return CausalDiagram({{"Z", z_card}, {"X", 2}, {"Y", 2}},
                         {{"Z", "X"}, {"Z", "Y"}, {"X", "Y"}}, {}, "X", "Y");
}

CausalDiagram fig1b() {
    return CausalDiagram({{"Z", 2}, {"X", 2}, {"Y", 2}}, {{"Z", "Y"}, {"X", "Y"}}, {},
                         "X", "Y");
}

CausalDiagram fig2() {
    return CausalDiagram({{"X", 2}, {"Z", 2}, {"Y", 2}},
                         {{"X", "Z"}, {"Z", "Y"}, {"X", "Y"}}, {{"X", "Z"}}, "X", "Y");
}

CausalDiagram fig3() {
    return CausalDiagram({{"X", 2}, {"Z", 2}, {"Y", 2}}, {{"X", "Z"}, {"Z", "Y"}}, {},
                         "X", "Y");
}

CausalDiagram fig4() {
    return CausalDiagram({{"Z1", 2}, {"Z2", 2}, {"X", 2}, {"Y", 2}},
                         {{"Z1", "X"}, {"Z1", "Y"}, {"Z2", "X"}, {"Z2", "Y"}, {"X", "Y"}},
                         {}, "X", "Y");
}

CausalDiagram fig5() {
    return CausalDiagram({{"Z1", 2}, {"Z2", 2}, {"Z3", 2}, {"X", 2}, {"Y", 2}},
                         {{"Z1", "Z2"}, {"Z3", "Z2"}, {"Z1", "X"}, {"Z3", "Y"}, {"X", "Y"}},
                         {}, "X", "Y");
}

CausalDiagram bare() {
    return CausalDiagram({{"X", 2}, {"Y", 2}}, {{"X", "Y"}}, {{"X", "Y"}}, "X", "Y");
}

Problem drug_problem() {
    // Recovery counts for 700 patients, split by gender Z (1 = female),
    // treatment X (1 = drug) and outcome Y (1 = recovered).
    ObservationalTable obs = ObservationalTable::from_counts(
        {{"Z", 2}, {"X", 2}, {"Y", 2}},
        {2, 114, 41, 313,     // men:   no drug 2/114, drug 41/313 (died/recovered)
         107, 13, 109, 1});   // women: no drug 107/13, drug 109/1
    return Problem{fig1a(), std::move(obs), std::nullopt, std::nullopt, {"Z"}};
}

Problem inflammation_problem() {
    MediatorTables med;
    med.p_y_given_z = {0.5, 0.5};   // recovery is indifferent to inflammation
    med.p_z_do_x = {0.9, 0.1};      // inflammation rare under either arm
    med.p_z_do_xp = {0.9, 0.1};
    return Problem{fig3(), std::nullopt, std::nullopt, std::move(med), {"Z"}};
}

Problem ancestry_problem() {
    ExperimentalTable exp;
    exp.p_y_do_x = 0.5;
    exp.p_y_do_xp = 0.4;
    exp.strata = {{"z", 0.5, 0.75, 0.2}, {"z'", 0.5, 0.25, 0.6}};
    return Problem{fig1b(), std::nullopt, std::move(exp), std::nullopt, {"Z"}};
}

Problem cointoss_problem() {
    ExperimentalTable exp;
    exp.p_y_do_x = 0.5;
    exp.p_y_do_xp = 0.5;
    exp.strata = {{"heads", 0.5, 1.0, 0.0}, {"tails", 0.5, 0.0, 1.0}};
    return Problem{fig1b(), std::nullopt, std::move(exp), std::nullopt, {"Z"}};
}

SimPreset sim_preset(const std::string& name) {
    if (name == "fig1a") return {fig1a(), {"Z"}};
    if (name == "fig1a-z1024" || name == "fig1a-1024") return {fig1a(1024), {"Z"}};
    if (name == "fig4") return {fig4(), {"Z1", "Z2"}};
    if (name == "fig5") return {fig5(), {"Z1", "Z3"}};
    throw std::invalid_argument("unknown simulation preset '" + name +
                                "' (want fig1a, fig1a-z1024, fig4 or fig5)");
}

SimPreset verify_preset(const std::string& name) {
    if (name == "fig1a") return {fig1a(), {"Z"}};
    if (name == "fig1b") return {fig1b(), {"Z"}};
    if (name == "fig2") return {fig2(), {"Z"}};
    if (name == "fig3") return {fig3(), {"Z"}};
    if (name == "fig4") return {fig4(), {"Z1", "Z2"}};
    throw std::invalid_argument("unknown verification preset '" + name +
                                "' (want fig1a, fig1b, fig2, fig3 or fig4)");
}

} // namespace poc
