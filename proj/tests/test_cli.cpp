// End-to-end tests of the command line tool.  The binary path is injected by
// the build; each test works inside a scratch directory under the test
// runner's working directory.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const char* kTrivialSpec = R"({"sectors": [2], "q": [[0.0]], "level": 4})";
const char* kSingleSectorSpec =
    R"({"sectors": [2], "q": [[0.5]], "blocks": [{"sector": 0, "coord_a": 0, "coord_b": 1, "lambda": 2.0}], "level": 5})";
const char* kTwoSectorSpec =
    R"({"sectors": [2, 1], "q": [[0.3, -0.2], [-0.2, 0.5]], "blocks": [{"sector": 0, "coord_a": 0, "coord_b": 1, "lambda": 2.0}], "level": 5})";

fs::path scratch() {
    const fs::path dir = fs::current_path() / "cli_scratch";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& body) {
    const fs::path p = scratch() / name;
    std::ofstream f(p, std::ios::binary);
    f << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, const fs::path& capture = {}) {
    std::string cmd = std::string(TFOCK_CLI_PATH) + " " + args;
    if (!capture.empty())
        cmd += " > " + capture.string() + " 2>&1";
    else
        cmd += " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("cli: usage errors exit with code 2, help with 0") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("check") == 2);  // missing spec argument
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: validate accepts sound specs and lists violations otherwise") {
    const fs::path good = write_file("good.json", kTwoSectorSpec);
    CHECK(run_cli("validate " + good.string()) == 0);

    const fs::path bound =
        write_file("bound.json", R"({"sectors": [2, 1], "q": [[0.3, 1.0], [1.0, 0.5]], "level": 4})");
    const fs::path out = scratch() / "validate_bound.txt";
    CHECK(run_cli("validate " + bound.string(), out) == 2);
    CHECK(slurp(out).find("|q| < 1") != std::string::npos);

    const fs::path skew =
        write_file("skew.json", R"({"sectors": [2, 1], "q": [[0.3, 0.1], [-0.1, 0.5]], "level": 4})");
    CHECK(run_cli("validate " + skew.string()) == 2);

    const fs::path broken = write_file("broken.json", "{\"sectors\": [2,");
    const fs::path perr = scratch() / "validate_parse.txt";
    CHECK(run_cli("validate " + broken.string(), perr) == 2);
    CHECK(slurp(perr).find("error") != std::string::npos);

    CHECK(run_cli("validate " + (scratch() / "missing.json").string()) == 2);
}

TEST_CASE("cli: check passes the flat reference model and reports the identity collapse") {
    const fs::path spec = write_file("trivial.json", kTrivialSpec);
    const fs::path out_dir = scratch() / "check_trivial";
    CHECK(run_cli("check " + spec.string() + " --out " + out_dir.string()) == 0);

    const auto j = nlohmann::json::parse(slurp(out_dir / "report.json"));
    CHECK(j.at("pass") == true);
    REQUIRE(j.at("suites").size() == 8);
    bool saw_identity_row = false;
    for (const auto& suite : j.at("suites")) {
        CHECK(suite.at("pass") == true);
        if (suite.at("name") != "modular_flow") continue;
        for (const auto& row : suite.at("residuals"))
            if (row.at("check") == "delta_identity_residual") {
                saw_identity_row = true;
                CHECK(row.at("value").get<double>() <= 1e-12);
            }
    }
    CHECK(saw_identity_row);
}

TEST_CASE("cli: check passes the rotating single-sector model") {
    const fs::path spec = write_file("single.json", kSingleSectorSpec);
    const fs::path out_dir = scratch() / "check_single";
    CHECK(run_cli("check " + spec.string() + " --out " + out_dir.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out_dir / "report.json"));
    CHECK(j.at("pass") == true);
}

TEST_CASE("cli: a corrupted twist fails the braid suite with exit 1") {
    const fs::path spec = write_file("two.json", kTwoSectorSpec);
    const fs::path out_dir = scratch() / "check_corrupt";
    CHECK(run_cli("check " + spec.string() + " --level 4 --corrupt-twist --out " + out_dir.string()) == 1);
    const auto j = nlohmann::json::parse(slurp(out_dir / "report.json"));
    CHECK(j.at("pass") == false);
    for (const auto& suite : j.at("suites"))
        if (suite.at("name") == "yang_baxter") CHECK(suite.at("pass") == false);
}

TEST_CASE("cli: equal seeds produce byte-identical reports") {
    const fs::path spec = write_file("trivial2.json", kTrivialSpec);
    const fs::path a = scratch() / "rep_a", b = scratch() / "rep_b";
    CHECK(run_cli("check " + spec.string() + " --seed 99 --out " + a.string()) == 0);
    CHECK(run_cli("check " + spec.string() + " --seed 99 --out " + b.string()) == 0);
    const std::string ra = slurp(a / "report.json"), rb = slurp(b / "report.json");
    REQUIRE(!ra.empty());
    CHECK(ra == rb);
}

TEST_CASE("cli: moments emits a discrepancy table within tolerance") {
    const fs::path spec = write_file("two_m.json", kTwoSectorSpec);
    const fs::path out = scratch() / "moments.csv";
    CHECK(run_cli("moments " + spec.string() + " --max-order 3", out) == 0);

    std::istringstream is(slurp(out));
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "order,letters,matrix_re,matrix_im,oracle_re,oracle_im,abs_discrepancy");
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ++rows;
        const auto last = line.rfind(',');
        CHECK(std::stod(line.substr(last + 1)) <= 1e-10);
    }
    CHECK(rows == 3 + 9 + 27);

    CHECK(run_cli("moments " + spec.string() + " --max-order 9") == 2);  // past level - 1
    CHECK(run_cli("moments " + spec.string() + " --max-order 0") == 2);
    CHECK(run_cli("moments " + spec.string()) == 2);  // --max-order is required
}

TEST_CASE("cli: scan tables the kernel floor over the grid") {
    const fs::path spec = write_file("flat.json", R"({"sectors": [2], "q": [[0.5]], "level": 5})");
    const fs::path out = scratch() / "scan.csv";
    CHECK(run_cli("scan " + spec.string() + " --q 0,0.9 --level 3", out) == 0);

    std::istringstream is(slurp(out));
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "q,level,min_eigenvalue");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 3);
        rows.push_back(cells);
    }
    REQUIRE(rows.size() == 8);  // two grid points, levels 0..3
    for (const auto& r : rows)
        if (std::stod(r[0]) == 0.0) CHECK(std::stod(r[2]) == doctest::Approx(1.0).epsilon(1e-12));
    bool saw = false;
    for (const auto& r : rows)
        if (std::stod(r[0]) == 0.9 && r[1] == "2") {
            saw = true;
            CHECK(std::stod(r[2]) == doctest::Approx(0.1).epsilon(1e-9));
        }
    CHECK(saw);

    CHECK(run_cli("scan " + spec.string() + " --q 0,1.0 --level 3") == 2);  // grid outside (-1, 1)
}
