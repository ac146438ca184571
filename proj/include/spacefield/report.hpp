#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spacefield/crsv.hpp"
#include "spacefield/errors.hpp"
#include "spacefield/evaluation.hpp"

namespace spacefield {

inline constexpr const char* kReportSchema = "spacefield.report/1";

// Report document (JSON):
//   schema       "spacefield.report/1"
//   model        space-model id
//   params_hash  16 hex digits
//   metrics      {name: number}
//   series       {name: [number, ...]}
//   scenarios    [{xi, v_scenario, argmax_frame, zero_velocity_fallback}, ...] in xi order
//   tables       {name: {"rows": [...], "cols": [...], "values": [[number|null, ...], ...]}}
//   flags        [string, ...]
struct ReportTable {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<std::optional<double>>> values;

    friend bool operator==(const ReportTable&, const ReportTable&) = default;
};

struct EvaluationReport {
    std::string model;
    std::string params_hash;
    std::map<std::string, double> metrics;
    std::map<std::string, std::vector<double>> series;
    std::vector<ScenarioRecord> scenarios;
    std::map<std::string, ReportTable> tables;
    std::vector<std::string> flags;

    bool operator==(const EvaluationReport& o) const {
        auto same_scenarios = [&] {
            if (scenarios.size() != o.scenarios.size()) return false;
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                const auto &a = scenarios[i], &b = o.scenarios[i];
                if (a.xi != b.xi || a.v_scenario != b.v_scenario || a.argmax_frame != b.argmax_frame ||
                    a.zero_velocity_fallback != b.zero_velocity_fallback)
                    return false;
            }
            return true;
        };
        return model == o.model && params_hash == o.params_hash && metrics == o.metrics && series == o.series &&
               same_scenarios() && tables == o.tables && flags == o.flags;
    }
};

inline ReportTable correlation_report_table(const CorrelationTable& t) {
    ReportTable r;
    for (const char* n : kIndicatorNames) {
        r.rows.emplace_back(std::string(n) + "_i");
        r.cols.emplace_back(std::string(n) + "_i+1");
    }
    for (const auto& row : t.entries) r.values.emplace_back(row.begin(), row.end());
    return r;
}

inline nlohmann::ordered_json report_to_json(const EvaluationReport& r) {
    using J = nlohmann::ordered_json;
    J doc;
    doc["schema"] = kReportSchema;
    doc["model"] = r.model;
    doc["params_hash"] = r.params_hash;
    doc["metrics"] = J::object();
    for (const auto& [k, v] : r.metrics) doc["metrics"][k] = v;
    doc["series"] = J::object();
    for (const auto& [k, v] : r.series) doc["series"][k] = v;
    doc["scenarios"] = J::array();
    for (const auto& s : r.scenarios)
        doc["scenarios"].push_back({{"xi", s.xi},
                                    {"v_scenario", s.v_scenario},
                                    {"argmax_frame", s.argmax_frame},
                                    {"zero_velocity_fallback", s.zero_velocity_fallback}});
    doc["tables"] = J::object();
    for (const auto& [k, t] : r.tables) {
        J values = J::array();
        for (const auto& row : t.values) {
            J jr = J::array();
            for (const auto& v : row) jr.push_back(v ? J(*v) : J(nullptr));
            values.push_back(std::move(jr));
        }
        doc["tables"][k] = {{"rows", t.rows}, {"cols", t.cols}, {"values", std::move(values)}};
    }
    doc["flags"] = r.flags;
    return doc;
}

inline std::string format_report(const EvaluationReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline EvaluationReport parse_report(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    try {
        if (doc.at("schema").get<std::string>() != kReportSchema) throw SchemaError("report: unknown schema");
        EvaluationReport r;
        r.model = doc.at("model").get<std::string>();
        r.params_hash = doc.at("params_hash").get<std::string>();
        for (const auto& [k, v] : doc.at("metrics").items()) r.metrics[k] = v.get<double>();
        for (const auto& [k, v] : doc.at("series").items()) r.series[k] = v.get<std::vector<double>>();
        for (const auto& s : doc.at("scenarios"))
            r.scenarios.push_back({s.at("xi").get<int>(), s.at("v_scenario").get<double>(),
                                   s.at("argmax_frame").get<std::size_t>(),
                                   s.at("zero_velocity_fallback").get<bool>()});
        for (const auto& [k, t] : doc.at("tables").items()) {
            ReportTable table;
            table.rows = t.at("rows").get<std::vector<std::string>>();
            table.cols = t.at("cols").get<std::vector<std::string>>();
            for (const auto& row : t.at("values")) {
                std::vector<std::optional<double>> vals;
                for (const auto& v : row) vals.push_back(v.is_null() ? std::nullopt : std::optional(v.get<double>()));
                table.values.push_back(std::move(vals));
            }
            r.tables[k] = std::move(table);
        }
        r.flags = doc.at("flags").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("report: ") + e.what());
    }
}

inline void export_report(const EvaluationReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << format_report(r);
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace spacefield
