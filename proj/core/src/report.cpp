#include "dube/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

namespace dube {

ReportFormat parse_report_format(const std::string& s)
{
    if (s == "csv") {
        return ReportFormat::Csv;
    }
    if (s == "text") {
        return ReportFormat::Text;
    }
    throw std::invalid_argument("unknown report format '" + s + "' (expected csv|text)");
}

void ReportTable::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size()) {
        throw std::logic_error("report row width does not match table '" + name + "'");
    }
    rows.push_back(std::move(row));
}

ReportTable& Report::table(const std::string& name)
{
    for (auto& t : tables) {
        if (t.name == name) {
            return t;
        }
    }
    tables.push_back(ReportTable{name, {}, {}});
    return tables.back();
}

const ReportTable* Report::find_table(const std::string& name) const
{
    for (const auto& t : tables) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

namespace {

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string Report::render(ReportFormat format, bool with_timestamp) const
{
    std::ostringstream out;
    out << "# dube-report v" << schema_version << '\n';
    if (with_timestamp) {
        out << "# generated: " << utc_timestamp() << '\n';
    }
    if (!timing.empty()) {
        out << "# timing:";
        for (const auto& [key, value] : timing) {
            out << ' ' << key << '=' << value;
        }
        out << '\n';
    }
    out << "# command: " << command << '\n';
    for (const auto& [key, value] : meta) {
        out << "# " << key << ": " << value << '\n';
    }
    for (const auto& t : tables) {
        out << '\n';
        if (format == ReportFormat::Csv) {
            out << "# table: " << t.name << '\n';
            for (std::size_t j = 0; j < t.columns.size(); ++j) {
                out << (j ? "," : "") << csv_cell(t.columns[j]);
            }
            out << '\n';
            for (const auto& row : t.rows) {
                for (std::size_t j = 0; j < row.size(); ++j) {
                    out << (j ? "," : "") << csv_cell(row[j]);
                }
                out << '\n';
            }
        } else {
            out << '[' << t.name << "]\n";
            for (const auto& row : t.rows) {
                for (std::size_t j = 0; j < row.size(); ++j) {
                    out << (j ? " " : "") << t.columns[j] << '=' << row[j];
                }
                out << '\n';
            }
        }
    }
    return out.str();
}

std::string report_body(const std::string& rendered)
{
    std::istringstream in(rendered);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# generated:", 0) == 0 || line.rfind("# timing:", 0) == 0) {
            continue;
        }
        out << line << '\n';
    }
    return out.str();
}

std::string format_real(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace dube
