#include <sstream>

#include <nlohmann/json.hpp>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"
#include "cosched/simulator.hpp"

namespace cosched {

void write_report_csv(const std::string& path, const SimulationReport& report, int servers,
                      const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& c : header_comments) out << "# " << c << "\n";
    out << "queue_id,policy,servers,makespan_s,normalized,predict_time_s,solve_time_s\n";
    for (const auto& q : report.queues)
        for (const auto& po : q.policies)
            out << q.queue_id << ',' << policy_name(po.policy) << ',' << servers << ','
                << fmt_fixed(po.makespan_s, 6) << ',' << fmt_fixed(po.normalized, 6) << ','
                << fmt_fixed(po.predict_time_s, 6) << ',' << fmt_fixed(po.solve_time_s, 6) << "\n";
    write_text_file(path, out.str());
}

std::vector<ReportRow> read_report_csv(const std::string& path) {
    CsvFile csv = read_csv(path);
    const int c_q = require_column(csv, "queue_id", path);
    const int c_p = require_column(csv, "policy", path);
    const int c_s = require_column(csv, "servers", path);
    const int c_m = require_column(csv, "makespan_s", path);
    const int c_n = require_column(csv, "normalized", path);
    const int c_pt = require_column(csv, "predict_time_s", path);
    const int c_st = require_column(csv, "solve_time_s", path);
    std::vector<ReportRow> rows;
    for (const auto& row : csv.rows) {
        ReportRow r;
        r.queue_id = static_cast<int>(parse_int(row.fields[c_q], row.line_no, "queue_id"));
        r.policy = row.fields[c_p];
        r.servers = static_cast<int>(parse_int(row.fields[c_s], row.line_no, "servers"));
        r.makespan_s = parse_real(row.fields[c_m], row.line_no, "makespan_s");
        r.normalized = parse_real(row.fields[c_n], row.line_no, "normalized");
        r.predict_time_s = parse_real(row.fields[c_pt], row.line_no, "predict_time_s");
        r.solve_time_s = parse_real(row.fields[c_st], row.line_no, "solve_time_s");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_timeline_json(const std::string& path, const SimulationReport& report, int servers) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& q : report.queues) {
        for (const auto& po : q.policies) {
            nlohmann::json entries = nlohmann::json::array();
            for (const auto& e : po.timeline)
                entries.push_back({{"app", e.app_id}, {"server", e.server}, {"start_s", e.start_s},
                                   {"end_s", e.end_s}});
            runs.push_back({{"queue_id", q.queue_id},
                            {"policy", policy_name(po.policy)},
                            {"servers", servers},
                            {"makespan_s", po.makespan_s},
                            {"entries", std::move(entries)}});
        }
    }
    nlohmann::json j;
    j["runs"] = std::move(runs);
    write_text_file(path, j.dump() + "\n");
}

} // namespace cosched
