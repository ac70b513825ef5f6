#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ncflow {

// Shortest round-trip decimal of a double, locale independent.
std::string format_double(double v);

// RFC 4180 field quoting: wrap in quotes when the value carries a comma,
// quote, or newline, doubling embedded quotes.
std::string csv_field(const std::string& raw);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& file,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& fields);
    void row_numbers(const std::vector<double>& values);

  private:
    std::ofstream out_;
    std::size_t width_;
};

// Output directory resolution: a relative configured path is placed under
// the NCFLOW_OUTPUT_ROOT environment variable when set, otherwise under the
// working directory.  Absolute paths are taken as given.
std::filesystem::path resolve_output_dir(const std::string& configured);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

} // namespace ncflow
