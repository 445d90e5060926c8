#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pocbounds/bounds.hpp"
#include "pocbounds/graph.hpp"
#include "pocbounds/rng.hpp"
#include "pocbounds/tables.hpp"

namespace poc {

// Conditional probability tables for every node: rows[v][parent_config] is
// the distribution of node v under that configuration of its parents
// (sorted by index, last parent fastest - the oracle's convention).
struct CptSet {
    std::vector<std::vector<std::vector<double>>> rows;
};

// Every row drawn uniformly from the probability simplex (normalized
// Exponential(1) variates), nodes in index order, configurations in order.
CptSet generate_cpts(const CausalDiagram& g, Rng& rng);

// Dense observational joint over all nodes implied by the CPTs. Meant for
// cross-checking the simulation's direct accumulation against the generic
// table machinery; too slow for the inner loop at large cardinalities.
ObservationalTable joint_from_cpts(const CausalDiagram& g, const CptSet& cpts);

struct SimRecord {
    std::size_t index = 0;
    BoundInterval tp;       // Tian-Pearl from adjusted aggregates + obs cells
    BoundInterval diagram;  // covariate-stratified (back-door) bounds
};

struct SimSummary {
    std::size_t n = 0;
    double avg_increased_lower = 0.0;  // mean(diagram.lower - tp.lower)
    double avg_decreased_upper = 0.0;  // mean(tp.upper - diagram.upper)
    double avg_gap_without = 0.0;      // mean Tian-Pearl width
    double avg_gap_with = 0.0;         // mean stratified width
};

/**
 * Monte Carlo comparison of the aggregate Tian-Pearl PNS bounds against the
 * covariate-stratified bounds on random models over the diagram. Sample i
 * draws its CPTs from the dedicated substream (seed, kCpt, i), so any prefix
 * of a run is reproducible independently of n. The covariates must form a
 * back-door set for the diagram. Throws std::invalid_argument on n = 0.
 */
std::vector<SimRecord> run_simulation(const CausalDiagram& g,
                                      const std::vector<std::string>& covariates,
                                      std::size_t n, std::uint64_t seed);

SimSummary summarize(const std::vector<SimRecord>& records);

// index,tp_lower,tp_upper,diagram_lower,diagram_upper - one row per record.
void emit_records_csv(const std::vector<SimRecord>& records, std::ostream& out);

/**
 * Plot-ready subsample: k records picked without replacement (substream
 * (seed, kPlotPick, 0)), sorted by the stratified-bound gap, ties by index.
 * Columns: index, tp_lower, diagram_lower, diagram_upper, tp_upper. Throws
 * std::invalid_argument when k exceeds the record count.
 */
void emit_plot_data(const std::vector<SimRecord>& records, std::size_t k,
                    std::uint64_t seed, std::ostream& out);

} // namespace poc
