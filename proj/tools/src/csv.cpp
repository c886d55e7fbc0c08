#include "gk/cli/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <sstream>

#include "gk/errors.hpp"

namespace gk::cli {

namespace {

std::string quoted(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_line(const std::string& text, std::size_t& pos, std::size_t line) {
    std::vector<std::string> fields(1);
    bool in_quotes = false;
    while (pos < text.size()) {
        const char c = text[pos++];
        if (in_quotes) {
            if (c == '"' && pos < text.size() && text[pos] == '"') {
                fields.back() += '"';
                ++pos;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c == '\n') {
            return fields;
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    if (in_quotes) {
        throw Error(fmt::format("csv line {}: unterminated quoted field", line));
    }
    return fields;
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::string format_number(const std::optional<double>& x) {
    return x ? format_number(*x) : std::string();
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) {
        throw Error("cannot create '" + path + "'");
    }
    row(header);
    rows_ = 0;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw Error(fmt::format("csv row has {} fields, header has {}", fields.size(), columns_));
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k > 0) {
            out_ << ',';
        }
        out_ << quoted(fields[k]);
    }
    out_ << '\n';
    ++rows_;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) {
            return k;
        }
    }
    throw Error("csv has no column '" + name + "'");
}

std::optional<double> CsvTable::number(std::size_t row, const std::string& name) const {
    const auto& field = rows.at(row).at(column(name));
    if (field.empty()) {
        return std::nullopt;
    }
    double x = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (ec != std::errc() || end != field.data() + field.size()) {
        throw Error("csv field '" + field + "' in column '" + name + "' is not a number");
    }
    return x;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::size_t pos = 0;
    std::size_t line = 1;
    if (text.empty()) {
        throw Error("csv is empty");
    }
    table.header = split_line(text, pos, line);
    while (pos < text.size()) {
        ++line;
        auto fields = split_line(text, pos, line);
        if (fields.size() != table.header.size()) {
            throw Error(fmt::format("csv line {} has {} fields, header has {}", line,
                                    fields.size(), table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

}  // namespace gk::cli
