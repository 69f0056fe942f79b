#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cosched {

// Minimal CSV support for the toolkit's file formats: comma-separated,
// UTF-8, '#' comment lines, no quoting (fields are identifiers and numbers).

struct CsvRow {
    int line_no = 0; // 1-based line in the file
    std::vector<std::string> fields;
};

struct CsvFile {
    std::vector<std::string> comments; // leading '#' lines, in order
    CsvRow header;
    std::vector<CsvRow> rows;
};

// Reads the whole file; first non-comment line is the header.
// Fails with code "io_error" (missing file) or "malformed_row".
CsvFile read_csv(const std::string& path);

// Column lookup helpers; fail with "malformed_row" naming the line.
int find_column(const CsvFile& csv, const std::string& name);            // -1 when absent
int require_column(const CsvFile& csv, const std::string& name, const std::string& path);

double parse_real(const std::string& text, int line_no, const std::string& what);
long parse_int(const std::string& text, int line_no, const std::string& what);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string fmt_double(double v);
// Fixed-precision form for report-style columns.
std::string fmt_fixed(double v, int digits);

// FNV-1a 64-bit over a file's bytes; used for provenance headers.
std::uint64_t hash_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace cosched
