#include "pqtopk/bench.hpp"
#include "pqtopk/core.hpp"

#include <json.hpp>

#include <iomanip>
#include <map>
#include <sstream>

namespace pqtopk {

namespace {

using nlohmann::json;

std::string csv_number(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os << std::setprecision(9) << *v;
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw ValidationError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
    return format == ReportFormat::csv ? emit_csv(report) : emit_json(report);
}

std::string emit_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "method,num_items,m,b,d,K,queries,median_ms,p10_ms,p90_ms,est_bytes,skipped,reason\n";
    for (const auto& e : report.entries) {
        os << method_name(e.method) << ',' << e.num_items << ',' << e.num_splits << ',' << e.num_sub_ids << ','
           << e.embed_dim << ',' << e.k << ',' << e.queries << ',' << csv_number(e.median_ms) << ','
           << csv_number(e.p10_ms) << ',' << csv_number(e.p90_ms) << ',' << e.est_bytes << ','
           << (e.skipped ? "true" : "false") << ',' << csv_field(e.reason) << '\n';
    }
    return os.str();
}

std::string emit_json(const BenchReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({
            {"method", std::string(method_name(e.method))},
            {"num_items", e.num_items},
            {"m", e.num_splits},
            {"b", e.num_sub_ids},
            {"d", e.embed_dim},
            {"K", e.k},
            {"queries", e.queries},
            {"median_ms", optional_json(e.median_ms)},
            {"p10_ms", optional_json(e.p10_ms)},
            {"p90_ms", optional_json(e.p90_ms)},
            {"precompute_median_ms", optional_json(e.precompute_median_ms)},
            {"precompute_fraction", optional_json(e.precompute_fraction)},
            {"est_bytes", e.est_bytes},
            {"skipped", e.skipped},
            {"reason", e.reason},
        });
    }
    const json doc{{"threads", report.threads}, {"entries", entries}};
    return doc.dump(2) + "\n";
}

BenchReport parse_json_report(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed report JSON: ") + e.what());
    }
    BenchReport report;
    try {
        report.threads = doc.at("threads").get<int>();
        for (const auto& j : doc.at("entries")) {
            BenchEntry e;
            e.method = parse_method(j.at("method").get<std::string>());
            e.num_items = j.at("num_items").get<std::uint64_t>();
            e.num_splits = j.at("m").get<std::uint64_t>();
            e.num_sub_ids = j.at("b").get<std::uint64_t>();
            e.embed_dim = j.at("d").get<std::uint64_t>();
            e.k = j.at("K").get<std::uint64_t>();
            e.queries = j.at("queries").get<std::uint32_t>();
            e.median_ms = optional_from(j, "median_ms");
            e.p10_ms = optional_from(j, "p10_ms");
            e.p90_ms = optional_from(j, "p90_ms");
            e.precompute_median_ms = optional_from(j, "precompute_median_ms");
            e.precompute_fraction = optional_from(j, "precompute_fraction");
            e.est_bytes = j.at("est_bytes").get<std::uint64_t>();
            e.skipped = j.at("skipped").get<bool>();
            e.reason = j.at("reason").get<std::string>();
            report.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("report JSON missing or mistyped field: ") + e.what());
    }
    return report;
}

std::string emit_gnuplot(const BenchReport& report, std::string_view title) {
    std::map<std::string, std::vector<const BenchEntry*>> series;
    std::vector<std::string> order;
    for (const auto& e : report.entries) {
        if (e.skipped || !e.median_ms) continue;
        const std::string name(method_name(e.method));
        if (!series.contains(name)) order.push_back(name);
        series[name].push_back(&e);
    }

    std::ostringstream os;
    os << "# gnuplot -p <this file>\n";
    os << "set title \"" << title << "\"\n";
    os << "set logscale xy\n";
    os << "set xlabel \"Number of items in catalogue\"\n";
    os << "set ylabel \"Median response time (ms)\"\n";
    os << "set key left top\n";
    os << "set grid\n";
    os << std::setprecision(9);
    for (const auto& name : order) {
        os << '$' << name << " << EOD\n";
        for (const auto* e : series[name]) os << e->num_items << ' ' << *e->median_ms << '\n';
        os << "EOD\n";
    }
    if (order.empty()) {
        os << "# no measured cells\n";
        return os.str();
    }
    os << "plot ";
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) os << ", \\\n     ";
        os << '$' << order[i] << " with linespoints title \"" << order[i] << '"';
    }
    os << '\n';
    return os.str();
}

} // namespace pqtopk
