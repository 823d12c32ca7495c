#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dube {

enum class ReportFormat { Csv, Text };

ReportFormat parse_report_format(const std::string& s);

struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// Structured experiment report.
///
/// Layout (both formats):
///   # dube-report v1
///   # generated: <UTC timestamp>        (volatile)
///   # timing: <key>=<ms> ...             (volatile)
///   # command: ...
///   # <meta key>: <value>
///   then one block per table.
/// CSV tables are a "# table: <name>" line, a header row and data rows. Text
/// tables are a "[<name>]" line followed by one "col=value ..." line per row.
/// Everything except the volatile lines is deterministic given the config.
struct Report {
    static constexpr int schema_version = 1;

    std::string command;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::pair<std::string, std::string>> timing;
    std::vector<ReportTable> tables;

    ReportTable& table(const std::string& name);
    const ReportTable* find_table(const std::string& name) const;

    std::string render(ReportFormat format, bool with_timestamp = true) const;
};

/// Drops the volatile header lines (timestamp and timings) from a rendered report.
std::string report_body(const std::string& rendered);

/// Fixed-precision formatting used in report cells.
std::string format_real(double v, int digits = 6);

}  // namespace dube
