#pragma once

// Model-spec JSON ingestion and the run configuration shared by the CLI
// commands.  Spec files look like
//
//   {
//     "sectors": [2, 1],
//     "q": [[0.3, -0.2], [-0.2, 0.5]],
//     "blocks": [{"sector": 0, "coord_a": 0, "coord_b": 1, "lambda": 2.0}],
//     "level": 5
//   }
//
// where block coordinates are sector-local and `blocks`/`level` are optional.

#include <cstdint>
#include <string>

#include "json.hpp"
#include "tfock/model.hpp"

namespace tfock {

// Throws std::invalid_argument with a human-readable message on structural
// problems; value-level violations are left to validate_spec.
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json model_spec_to_json(const ModelSpec& spec);

// Reads and parses a spec file; throws std::runtime_error on I/O failure and
// nlohmann::json::parse_error (with byte offset) on malformed JSON.
ModelSpec load_model_spec(const std::string& path);

struct RunConfig {
    ModelSpec spec;
    double tol_scale = 1.0;        // multiplies every suite tolerance
    std::uint64_t seed = 1234567;  // base seed; suites derive their own
    std::string out_dir;           // where report.json lands; empty = no file
    bool embed_timings = false;    // timings make reports non-reproducible
    bool corrupt_twist = false;    // negative-control hook for the braid suite
};

}  // namespace tfock
