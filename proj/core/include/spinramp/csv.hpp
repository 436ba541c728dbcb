#pragma once

// Deterministic CSV emission: fixed 12-significant-digit scientific floats,
// UNIX newlines, numeric fields plus one percent-encoded message column.

#include <string>
#include <vector>

namespace spinramp {

/// 12 significant digits, scientific notation, locale-independent.
std::string format_float(double v);

/// Percent-encode everything outside [A-Za-z0-9._~-].
std::string percent_encode(const std::string& s);

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void write_file(const std::string& path) const;

    static std::string num(double v) { return format_float(v); }
    static std::string integer(long v) { return std::to_string(v); }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace spinramp
