#include "hhh/report.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace hhh {

using ordered_json = nlohmann::ordered_json;

void sort_entries(HhhReport& report) {
    struct Keyed {
        uint32_t level;
        std::string text;
        HhhOutputEntry entry;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(report.entries.size());
    for (const HhhOutputEntry& e : report.entries) {
        keyed.push_back(Keyed{report.spec.level(e.prefix.label),
                              to_string(report.spec, e.prefix), e});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.level != b.level) return a.level > b.level;
        return a.text < b.text;
    });
    report.entries.clear();
    for (Keyed& k : keyed) report.entries.push_back(k.entry);
}

std::string to_csv(const HhhReport& report) {
    std::string out;
    out += "#hhh-report,v1\n";
    out += "#spec," + report.spec.to_string() + "\n";
    out += "#d," + std::to_string(report.spec.dimensions()) + "\n";
    out += "#H," + std::to_string(report.spec.node_count()) + "\n";
    out += "#epsilon," + report.epsilon.str() + "\n";
    out += "#phi," + report.phi.str() + "\n";
    out += "#N," + std::to_string(report.total) + "\n";
    out += "prefix,label,f_min,f_max,f_prime\n";
    for (const HhhOutputEntry& e : report.entries) {
        out += '"' + to_string(report.spec, e.prefix) + "\",\"" +
               to_string(report.spec, e.prefix.label) + "\"," + std::to_string(e.f_min) + ',' +
               std::to_string(e.f_max) + ',' + std::to_string(e.f_prime) + '\n';
    }
    return out;
}

std::string to_json(const HhhReport& report) {
    ordered_json j;
    j["schema"] = "hhh-report/1";
    j["spec"] = report.spec.to_string();
    j["d"] = report.spec.dimensions();
    j["H"] = report.spec.node_count();
    j["epsilon"] = report.epsilon.str();
    j["phi"] = report.phi.str();
    j["N"] = report.total;
    j["warnings"] = report.warnings;
    ordered_json entries = ordered_json::array();
    for (const HhhOutputEntry& e : report.entries) {
        ordered_json row;
        row["prefix"] = to_string(report.spec, e.prefix);
        ordered_json label = ordered_json::array();
        for (std::size_t i = 0; i < report.spec.dimensions(); ++i) {
            label.push_back(e.prefix.label.entry[i]);
        }
        row["label"] = label;
        row["level"] = report.spec.level(e.prefix.label);
        row["f_min"] = e.f_min;
        row["f_max"] = e.f_max;
        row["f_prime"] = e.f_prime;
        entries.push_back(row);
    }
    j["entries"] = entries;
    return j.dump(2) + "\n";
}

HhhReport report_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.at("schema").get<std::string>() != "hhh-report/1") {
        throw std::invalid_argument("unsupported report schema");
    }
    HierarchySpec spec = HierarchySpec::from_string(j.at("spec").get<std::string>());
    HhhReport report(spec, Rational::parse(j.at("epsilon").get<std::string>()),
                     Rational::parse(j.at("phi").get<std::string>()),
                     j.at("N").get<uint64_t>());
    for (const auto& row : j.at("entries")) {
        HhhOutputEntry e;
        e.prefix = parse_prefix(spec, row.at("prefix").get<std::string>());
        e.f_min = row.at("f_min").get<uint64_t>();
        e.f_max = row.at("f_max").get<uint64_t>();
        e.f_prime = row.at("f_prime").get<uint64_t>();
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace hhh
