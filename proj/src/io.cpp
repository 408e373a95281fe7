#include "infofit/io.hpp"

#include <cstdio>
#include <sstream>

#include "infofit/common.hpp"

namespace infofit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw ConfigError("cannot open for writing: " + path.string());
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out_ << ",";
        out_ << cols[i];
    }
    out_ << "\n";
}

void CsvWriter::write_field(double v, bool& first) {
    if (!first) out_ << ",";
    first = false;
    out_ << format_double(v);
}

void CsvWriter::write_field(long v, bool& first) {
    if (!first) out_ << ",";
    first = false;
    out_ << v;
}

void CsvWriter::write_field(int v, bool& first) {
    if (!first) out_ << ",";
    first = false;
    out_ << v;
}

void CsvWriter::write_field(const std::string& v, bool& first) {
    if (!first) out_ << ",";
    first = false;
    out_ << v;
}

void CsvWriter::write_field(const char* v, bool& first) {
    if (!first) out_ << ",";
    first = false;
    out_ << v;
}

CsvReader::CsvReader(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());

    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);

        if (!saw_header) {
            header_ = std::move(fields);
            saw_header = true;
        } else {
            rows_.push_back(std::move(fields));
        }
    }
}

}  // namespace infofit
