#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace xctrl {

// Minimal CSV reading: header row required, comma separator, double quotes
// honored. Good enough for Statcast exports and our own outputs.
class CsvReader {
  public:
    explicit CsvReader(const std::filesystem::path& path);

    const std::vector<std::string>& header() const { return header_; }
    std::optional<std::size_t> column(const std::string& name) const;

    // Advances to the next data row; false at end of file.
    bool next_row();
    const std::vector<std::string>& row() const { return fields_; }
    std::size_t line_number() const { return line_; }

    static std::vector<std::string> split_line(const std::string& line);

  private:
    std::ifstream in_;
    std::vector<std::string> header_;
    std::vector<std::string> fields_;
    std::size_t line_ = 0;
};

std::optional<double> try_parse_double(const std::string& s);
std::optional<int> try_parse_int(const std::string& s);

// Shortest representation that round-trips a double exactly.
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

// Write-temp-then-rename so a crash never leaves a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace xctrl
