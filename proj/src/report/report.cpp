#include "hedcheck/report.hpp"

#include "hedcheck/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace hedcheck {

using ordered_json = nlohmann::ordered_json;

std::string report_json(const Verdict& v, const ReportContext& ctx) {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["verdict"] = result_text(v.result);
    j["spec"] = ctx.spec_path;
    j["impl"] = ctx.impl_path;

    ordered_json cfg;
    cfg["width"] = ctx.config.width ? ordered_json(*ctx.config.width) : ordered_json(nullptr);
    cfg["maxNodes"] =
        ctx.config.max_nodes == kUnlimitedNodes ? ordered_json(nullptr) : ordered_json(ctx.config.max_nodes);
    cfg["outputsMap"] = ordered_json::object();
    for (const auto& [s, i] : ctx.config.output_map) cfg["outputsMap"][s] = i;
    j["config"] = cfg;

    j["matched"] = ordered_json::array();
    for (const auto& m : v.matched)
        j["matched"].push_back(
            {{"spec", m.spec}, {"impl", m.impl}, {"cutVar", m.cut.empty() ? ordered_json(nullptr) : ordered_json(m.cut)}});
    j["outputs"] = v.outputs;
    j["unmatched"] = ordered_json::array();
    for (const auto& u : v.unmatched)
        j["unmatched"].push_back({{"spec", u.spec}, {"impl", u.impl}, {"difference", u.difference}});

    const SecCounters& c = v.counters;
    j["counters"] = {
        {"segments", c.segments},
        {"internalEquCalls", c.internal_equ_calls},
        {"peels", c.peels},
        {"peakNodeCount", c.peak_node_count},
        {"cutVars", c.cut_vars},
        {"confirmations", c.confirmations},
        {"budgetOverflows", c.budget_overflows},
        {"specStatements", c.spec_statements},
        {"implStatements", c.impl_statements},
        {"inexactFlags", v.inexact.size()},
    };
    j["inexact"] = v.inexact;
    j["assumptions"] = v.assumptions;
    j["elapsedMs"] = ctx.elapsed_ms;
    return j.dump(2) + "\n";
}

std::map<std::string, std::string> parse_output_map(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        std::istringstream fields(line);
        std::string s, i, extra;
        if (!(fields >> s) || s[0] == '#') continue;
        if (!(fields >> i) || (fields >> extra))
            throw Error("output map line " + std::to_string(n) + ": expected two names");
        if (!out.emplace(s, i).second) throw Error("output map line " + std::to_string(n) + ": '" + s + "' mapped twice");
    }
    return out;
}

std::map<std::string, std::string> load_output_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open output map '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_output_map(ss.str());
}

} // namespace hedcheck
