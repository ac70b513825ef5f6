#include "ncflow/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ncflow/errors.hpp"

namespace ncflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& file,
                     const std::vector<std::string>& columns)
    : out_(file), width_(columns.size()) {
    require(out_.good(), ErrorKind::io,
            "cannot open " + file.string() + " for writing");
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    require(fields.size() == width_, ErrorKind::io,
            "csv row width does not match the header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_field(fields[i]);
    }
    out_ << '\n';
}

void CsvWriter::row_numbers(const std::vector<double>& values) {
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(format_double(v));
    row(fields);
}

std::filesystem::path resolve_output_dir(const std::string& configured) {
    std::filesystem::path p(configured);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("NCFLOW_OUTPUT_ROOT"))
        return std::filesystem::path(root) / p;
    return p;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file);
    require(out.good(), ErrorKind::io,
            "cannot open " + file.string() + " for writing");
    out << text;
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file);
    require(in.good(), ErrorKind::io, "cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace ncflow
