// Command line front end.  Subcommands:
//   validate <spec.json>                      parse + invariant diagnostics
//   check    <spec.json> [--level --tol --seed --out --timings]
//   moments  <spec.json> --max-order K        moment table vs the oracle
//   scan     <spec.json> --q a,b,c [--level]  kernel floor over a q grid
// Exit codes: 0 success, 1 suite failure, 2 configuration or usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tfock/suites.hpp"

namespace {

int cmd_validate(const std::string& path) {
    const tfock::ModelSpec spec = tfock::load_model_spec(path);
    const std::vector<std::string> violations = tfock::validate_spec(spec);
    if (violations.empty()) {
        std::printf("ok\n");
        return 0;
    }
    for (const std::string& v : violations) std::printf("violation: %s\n", v.c_str());
    return 2;
}

int cmd_check(tfock::RunConfig cfg, const std::string& out_dir) {
    const tfock::CheckOutcome out = tfock::run_check(cfg);
    std::fputs(tfock::render_report_console(out.report).c_str(), stdout);
    const std::string json = tfock::render_report_json(out.report, cfg.embed_timings);
    std::filesystem::path target = "report.json";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        target = std::filesystem::path(out_dir) / "report.json";
    }
    std::ofstream f(target, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot write %s\n", target.string().c_str());
        return 2;
    }
    f << json;
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical workbench for truncated twisted Fock models"};
    app.require_subcommand(1);

    std::string v_path;
    CLI::App* vcmd = app.add_subcommand("validate", "parse a model spec and list every violated requirement");
    vcmd->add_option("spec", v_path, "model spec JSON file")->required();

    std::string c_path, c_out;
    int c_level = 0;
    double c_tol = 0.0;
    std::uint64_t c_seed = 1234567;
    bool c_timings = false, c_corrupt = false;
    CLI::App* ccmd = app.add_subcommand("check", "run the verification suites and write report.json");
    ccmd->add_option("spec", c_path, "model spec JSON file")->required();
    ccmd->add_option("--level", c_level, "override the truncation level");
    ccmd->add_option("--tol", c_tol, "algebraic tolerance (default 1e-10; the modular checks scale along)");
    ccmd->add_option("--seed", c_seed, "base seed for the randomized checks");
    ccmd->add_option("--out", c_out, "directory receiving report.json (default: working directory)");
    ccmd->add_flag("--timings", c_timings, "embed per-suite timings (makes reports non-reproducible)");
    ccmd->add_flag("--corrupt-twist", c_corrupt)->group("");  // negative-control hook for the braid suite

    std::string m_path;
    int m_order = 0;
    CLI::App* mcmd = app.add_subcommand("moments", "emit a CSV of vacuum moments against the pairing oracle");
    mcmd->add_option("spec", m_path, "model spec JSON file")->required();
    mcmd->add_option("--max-order", m_order, "largest moment order (at most level - 1)")->required();

    std::string s_path;
    std::vector<double> s_grid;
    int s_level = 0;
    CLI::App* scmd = app.add_subcommand("scan", "emit a CSV of kernel floors over a uniform deformation grid");
    scmd->add_option("spec", s_path, "model spec JSON file")->required();
    scmd->add_option("--q", s_grid, "comma-separated grid of deformation values in (-1, 1)")
        ->required()
        ->delimiter(',');
    scmd->add_option("--level", s_level, "override the truncation level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*vcmd) return cmd_validate(v_path);
        if (*ccmd) {
            tfock::RunConfig cfg;
            cfg.spec = tfock::load_model_spec(c_path);
            if (ccmd->count("--level") > 0) cfg.spec.level = c_level;
            if (ccmd->count("--tol") > 0) {
                if (!(c_tol > 0.0)) throw std::invalid_argument("--tol must be positive");
                cfg.tol_scale = c_tol / 1e-10;
            }
            cfg.seed = c_seed;
            cfg.embed_timings = c_timings;
            cfg.corrupt_twist = c_corrupt;
            return cmd_check(std::move(cfg), c_out);
        }
        if (*mcmd) {
            const tfock::ModelSpec spec = tfock::load_model_spec(m_path);
            std::fputs(tfock::moments_csv(spec, m_order).c_str(), stdout);
            return 0;
        }
        if (*scmd) {
            tfock::ModelSpec spec = tfock::load_model_spec(s_path);
            if (scmd->count("--level") > 0) spec.level = s_level;
            std::fputs(tfock::scan_csv(spec, s_grid).c_str(), stdout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
