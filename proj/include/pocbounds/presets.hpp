#pragma once

#include <string>
#include <vector>

#include "pocbounds/bounds.hpp"
#include "pocbounds/graph.hpp"

namespace poc {

// The recurring diagram shapes, all with treatment X and outcome Y.
CausalDiagram fig1a(int z_card = 2);  // Z -> X, Z -> Y, X -> Y
CausalDiagram fig1b();                // Z -> Y, X -> Y (randomized treatment)
CausalDiagram fig2();                 // X -> Z -> Y, X -> Y, latent X--Z
CausalDiagram fig3();                 // X -> Z -> Y
CausalDiagram fig4();                 // Z1, Z2 -> X; Z1, Z2 -> Y; X -> Y
CausalDiagram fig5();  // Z1 -> Z2 <- Z3, Z1 -> X, Z3 -> Y, X -> Y
CausalDiagram bare();                 // X -> Y, latent X--Y

// Worked example problems with their bundled data.
Problem drug_problem();          // fig1a, observed counts stratified by Z
Problem inflammation_problem();  // fig3, mediator tables only
Problem ancestry_problem();      // fig1b, stratified experimental rates
Problem cointoss_problem();      // fig1b, deterministic confounded coin

struct SimPreset {
    CausalDiagram graph;
    std::vector<std::string> covariates;
};

// Simulation ensembles: fig1a | fig1a-z1024 | fig4 | fig5. fig5 stratifies
// on {Z1, Z3} by default; any other valid back-door subset can be requested
// through run_simulation directly.
SimPreset sim_preset(const std::string& name);

// Oracle-verification ensembles: fig1a | fig1b | fig2 | fig3 | fig4, each
// with the covariate set the bounds are sharpened on.
SimPreset verify_preset(const std::string& name);

} // namespace poc
