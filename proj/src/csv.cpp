#include "cosched/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cosched/error.hpp"

namespace cosched {

static std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    // trim surrounding whitespace
    for (auto& f : out) {
        std::size_t b = f.find_first_not_of(" \t\r");
        std::size_t e = f.find_last_not_of(" \t\r");
        f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

CsvFile read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("io_error", "cannot open " + path);
    CsvFile csv;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            csv.comments.push_back(line);
            continue;
        }
        CsvRow row;
        row.line_no = line_no;
        row.fields = split_fields(line);
        if (!have_header) {
            csv.header = std::move(row);
            have_header = true;
        } else {
            if (row.fields.size() != csv.header.fields.size())
                fail("malformed_row", path + ":" + std::to_string(line_no) + ": expected " +
                                           std::to_string(csv.header.fields.size()) + " fields, got " +
                                           std::to_string(row.fields.size()));
            csv.rows.push_back(std::move(row));
        }
    }
    if (!have_header) fail("malformed_row", path + ": missing header row");
    return csv;
}

int find_column(const CsvFile& csv, const std::string& name) {
    for (std::size_t i = 0; i < csv.header.fields.size(); ++i)
        if (csv.header.fields[i] == name) return static_cast<int>(i);
    return -1;
}

int require_column(const CsvFile& csv, const std::string& name, const std::string& path) {
    int idx = find_column(csv, name);
    if (idx < 0) fail("malformed_row", path + ": missing required column '" + name + "'");
    return idx;
}

double parse_real(const std::string& text, int line_no, const std::string& what) {
    double v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        fail("malformed_row", "line " + std::to_string(line_no) + ": bad real for " + what + ": '" + text + "'");
    return v;
}

long parse_int(const std::string& text, int line_no, const std::string& what) {
    long v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        fail("malformed_row", "line " + std::to_string(line_no) + ": bad integer for " + what + ": '" + text + "'");
    return v;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return std::string(buf);
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("io_error", "cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io_error", "cannot write " + path);
    out << content;
    if (!out) fail("io_error", "write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("io_error", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace cosched
