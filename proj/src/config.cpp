#include "tfock/config.hpp"

#include <fstream>
#include <stdexcept>

namespace tfock {

namespace {

using nlohmann::json;

int as_int(const json& j, const char* what) {
    if (!j.is_number_integer()) throw std::invalid_argument(std::string(what) + " must be an integer");
    return j.get<int>();
}

double as_double(const json& j, const char* what) {
    if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
    return j.get<double>();
}

}  // namespace

ModelSpec model_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
    ModelSpec spec;

    if (!j.contains("sectors") || !j["sectors"].is_array())
        throw std::invalid_argument("spec.sectors must be an array of sector dimensions");
    for (const auto& e : j["sectors"]) spec.sector_dims.push_back(as_int(e, "spec.sectors[i]"));

    if (!j.contains("q") || !j["q"].is_array())
        throw std::invalid_argument("spec.q must be a square array of deformation parameters");
    const auto& q = j["q"];
    const size_t s = q.size();
    spec.q = MatrixXd::Zero(s, s);
    for (size_t i = 0; i < s; ++i) {
        if (!q[i].is_array() || q[i].size() != s)
            throw std::invalid_argument("spec.q must be square");
        for (size_t c = 0; c < s; ++c) spec.q(i, c) = as_double(q[i][c], "spec.q[i][j]");
    }

    if (j.contains("blocks")) {
        if (!j["blocks"].is_array()) throw std::invalid_argument("spec.blocks must be an array");
        for (const auto& e : j["blocks"]) {
            if (!e.is_object()) throw std::invalid_argument("spec.blocks[i] must be an object");
            for (const char* field : {"sector", "coord_a", "coord_b"})
                if (!e.contains(field))
                    throw std::invalid_argument(std::string("spec.blocks[i] is missing \"") + field + "\"");
            RotationBlock blk;
            blk.sector = as_int(e["sector"], "block.sector");
            blk.coord_a = as_int(e["coord_a"], "block.coord_a");
            blk.coord_b = as_int(e["coord_b"], "block.coord_b");
            if (e.contains("lambda")) blk.lambda = as_double(e["lambda"], "block.lambda");
            spec.blocks.push_back(blk);
        }
    }

    if (j.contains("level")) spec.level = as_int(j["level"], "spec.level");
    return spec;
}

nlohmann::ordered_json model_spec_to_json(const ModelSpec& spec) {
    nlohmann::ordered_json j;
    j["sectors"] = spec.sector_dims;
    nlohmann::ordered_json q = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < spec.q.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < spec.q.cols(); ++c) row.push_back(spec.q(i, c));
        q.push_back(row);
    }
    j["q"] = q;
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : spec.blocks) {
        nlohmann::ordered_json e;
        e["sector"] = b.sector;
        e["coord_a"] = b.coord_a;
        e["coord_b"] = b.coord_b;
        e["lambda"] = b.lambda;
        blocks.push_back(e);
    }
    j["blocks"] = blocks;
    j["level"] = spec.level;
    return j;
}

ModelSpec load_model_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);  // throws parse_error with byte offset
    return model_spec_from_json(j);
}

}  // namespace tfock
