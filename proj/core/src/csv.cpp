#include "spinramp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "spinramp/exceptions.hpp"

namespace spinramp {

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

std::string percent_encode(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const unsigned char c : s) {
        const bool plain = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                           (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '~' || c == '-';
        if (plain) {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw Error("CsvWriter: row width does not match header");
    rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
    std::string out;
    for (size_t i = 0; i < header_.size(); ++i) {
        if (i) out.push_back(',');
        out += header_[i];
    }
    out.push_back('\n');
    for (const auto& row : rows_) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += row[i];
        }
        out.push_back('\n');
    }
    return out;
}

void CsvWriter::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("CsvWriter: cannot open '" + path + "' for writing");
    const std::string s = str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace spinramp
