#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace infofit {

// Round-trip-exact decimal representation ("%.17g").
std::string format_double(double v);

// Comma-separated output with '#' comment lines and a single header row.
// Field values never contain commas in this project, so no quoting.
class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path);

    void comment(const std::string& text);
    void header(const std::vector<std::string>& cols);

    template <class... Ts>
    void row(const Ts&... vals) {
        bool first = true;
        (write_field(vals, first), ...);
        out_ << "\n";
    }

  private:
    void write_field(double v, bool& first);
    void write_field(long v, bool& first);
    void write_field(int v, bool& first);
    void write_field(const std::string& v, bool& first);
    void write_field(const char* v, bool& first);

    std::ofstream out_;
};

class CsvReader {
  public:
    explicit CsvReader(const std::filesystem::path& path);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace infofit
