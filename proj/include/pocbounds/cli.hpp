#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poc {

/**
 * Runs the pocbounds command line against `args` (argv without the program
 * name), writing normal output to `out` and diagnostics to `err`.
 *
 * Subcommands:
 *   bounds FILE    bound an estimand from a problem JSON file
 *   simulate       Monte Carlo comparison of bounds with/without the diagram
 *   verify         check bounds against exact SCM ground truth
 *   example NAME   worked example (drug | inflammation | ancestry | cointoss)
 *
 * Returns the process exit code:
 *   0  success
 *   1  usage, parse or schema error
 *   2  incoherent data, undefined estimand, infeasible program, or a
 *      verification run that found violations
 *   3  requested method ineligible for the diagram / supplied tables
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace poc
