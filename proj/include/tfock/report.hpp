#pragma once

// Structured results of the verification suites and their JSON/CSV
// rendering.  Report JSON is {model: {...}, suites: [{name, residuals:
// [{check, value, tol, pass}], pass}], pass}.  Checks named "diag_..." are
// informational: their values are reported but never gate `pass`.  For
// "min_eig_..." rows the pass direction is value > tol (a positivity floor);
// all other rows pass when value <= tol.
//
// Suite timings go to the console; they are embedded into the JSON only on
// request because they break byte-for-byte reproducibility.

#include <string>
#include <vector>

#include "json.hpp"

namespace tfock {

struct ResidualRow {
    std::string check;
    double value = 0.0;
    double tol = 0.0;
    bool pass = true;
};

struct SuiteResult {
    std::string name;
    std::vector<ResidualRow> rows;
    bool pass = true;
    double seconds = 0.0;

    void finish();  // pass = AND of row passes
};

struct Report {
    nlohmann::ordered_json model;
    std::vector<SuiteResult> suites;
    bool pass = true;

    void finish();  // pass = AND of suite passes
};

std::string render_report_json(const Report& r, bool embed_timings);

// One console line per suite plus a total.
std::string render_report_console(const Report& r);

// Shortest-faithful decimal formatting used by the CSV emitters.
std::string format_g17(double v);

}  // namespace tfock
