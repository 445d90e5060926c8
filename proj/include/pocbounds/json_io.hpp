#pragma once

#include <string>

#include "pocbounds/bounds.hpp"
#include "pocbounds/graph.hpp"
#include "pocbounds/tables.hpp"

namespace poc {

// Parsers for the JSON problem format. Every function throws
// std::invalid_argument on malformed JSON or schema violations; value-level
// defects (incoherent tables, crossed bounds) surface as the usual domain
// exceptions once the constructed objects validate themselves.
//
// Schema sketch:
//   diagram       {"nodes": [{"name": "Z", "card": 2}, ...],
//                  "edges": [["Z", "X"], ...], "latents": [["X", "Y"], ...],
//                  "treatment": "X", "outcome": "Y"}
//   observational {"variables": [{"name", "card"}, ...],
//                  "counts" | "probabilities": [ ... ]}
//   experimental  {"p_y_do_x", "p_y_do_xprime",
//                  "strata": [{"label", "p_z", "p_y_do_x", "p_y_do_xprime"}]}
//                 (aggregates may be omitted when strata are present)
//   mediator      {"p_y_given_z": [...] | "p_y_given_zx": [[at x', at x], ...],
//                  "p_z_do_x": [...], "p_z_do_xprime": [...]}
//   problem       {"diagram", "observational"?, "experimental"?, "mediator"?,
//                  "covariates"?: ["Z", ...]}
//   query         {"estimand"?: "pns", "method"?: "auto", "stratum"?: "z"}

CausalDiagram diagram_from_json(const std::string& text);
ObservationalTable observational_from_json(const std::string& text);
ExperimentalTable experimental_from_json(const std::string& text);
MediatorTables mediator_from_json(const std::string& text);
Problem problem_from_json(const std::string& text);
Problem load_problem(const std::string& path);
Query query_from_json(const std::string& text);

// Pretty-printed JSON report of a compute() result.
std::string result_to_json(const ComputeResult& r);

// Human-readable report, probabilities at four decimals.
std::string result_to_text(const ComputeResult& r);

} // namespace poc
