#pragma once

// Orchestration of the verification suites behind `check`, plus the CSV
// emitters behind `moments` and `scan`.  Suites run in a worker pool; each
// draws randomness from its own seed derived from the configured base, so
// reports are reproducible regardless of scheduling.

#include <string>
#include <vector>

#include "tfock/config.hpp"
#include "tfock/report.hpp"

namespace tfock {

struct CheckOutcome {
    Report report;
    int exit_code = 0;  // 0 all suites pass, 1 otherwise
};

// Runs the eight suites (positivity, yang_baxter, adjointness, wick_vacuum,
// commutant_relation, modular_flow, expectation, moment_oracle).  Throws
// std::invalid_argument for configs that cannot be run at all.
CheckOutcome run_check(const RunConfig& cfg);

// CSV of mixed vacuum moments over all sector-basis letter tuples up to
// max_order letters: matrix value, pair-partition oracle value, discrepancy.
// Requires max_order <= level - 1.
std::string moments_csv(const ModelSpec& spec, int max_order);

// CSV of the minimum level-kernel eigenvalue per (q, level) pair, with every
// deformation entry replaced by the grid value; grid points run in parallel.
std::string scan_csv(const ModelSpec& spec, const std::vector<double>& q_grid);

}  // namespace tfock
