#include "tfock/report.hpp"

#include <cstdio>

namespace tfock {

void SuiteResult::finish() {
    pass = true;
    for (const auto& r : rows) pass = pass && r.pass;
}

void Report::finish() {
    pass = true;
    for (const auto& s : suites) pass = pass && s.pass;
}

std::string render_report_json(const Report& r, bool embed_timings) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    nlohmann::ordered_json suites = nlohmann::ordered_json::array();
    for (const auto& s : r.suites) {
        nlohmann::ordered_json sj;
        sj["name"] = s.name;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : s.rows) {
            nlohmann::ordered_json rj;
            rj["check"] = row.check;
            rj["value"] = row.value;
            rj["tol"] = row.tol;
            rj["pass"] = row.pass;
            rows.push_back(rj);
        }
        sj["residuals"] = rows;
        sj["pass"] = s.pass;
        if (embed_timings) sj["seconds"] = s.seconds;
        suites.push_back(sj);
    }
    j["suites"] = suites;
    j["pass"] = r.pass;
    return j.dump(2) + "\n";
}

std::string render_report_console(const Report& r) {
    std::string out;
    for (const auto& s : r.suites) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-22s %-4s (%.2fs, %zu checks)\n", s.name.c_str(),
                      s.pass ? "pass" : "FAIL", s.seconds, s.rows.size());
        out += line;
        if (!s.pass) {
            for (const auto& row : s.rows)
                if (!row.pass) {
                    std::snprintf(line, sizeof(line), "    %-38s value=%.3e tol=%.3e\n",
                                  row.check.c_str(), row.value, row.tol);
                    out += line;
                }
        }
    }
    out += r.pass ? "overall: pass\n" : "overall: FAIL\n";
    return out;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace tfock
