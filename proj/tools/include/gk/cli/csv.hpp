#pragma once

// Headered CSV output (floats at 17 significant digits, so values read back
// bit-identically) and the matching reader.

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace gk::cli {

/// Shortest-safe round-trip text for a double.
std::string format_number(double x);
/// Empty field for a missing value.
std::string format_number(const std::optional<double>& x);

class CsvWriter {
public:
    /// Throws gk::Error if the file cannot be created.
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);
    std::size_t rows() const noexcept { return rows_; }

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws gk::Error if absent.
    std::size_t column(const std::string& name) const;
    /// Field parsed as a double; nullopt for an empty field.
    std::optional<double> number(std::size_t row, const std::string& name) const;
};

/// Parses text written by CsvWriter (quoted fields allowed).
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

}  // namespace gk::cli
