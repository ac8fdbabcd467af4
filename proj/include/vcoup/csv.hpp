// csv.hpp — CSV tables with full round-trip numeric precision.

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "vcoup/core.hpp"

namespace vcoup {

using CsvCell = std::variant<double, long long, std::string>;

// '%.17g' doubles, '.' decimal separator, mandatory header row.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header)
        : header_(std::move(header)) {}

    void add_row(std::vector<CsvCell> row) {
        if (row.size() != header_.size())
            throw DimensionError("CSV row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::string to_string() const {
        std::string out = join(header_);
        for (const auto& r : rows_) {
            std::vector<std::string> cells;
            cells.reserve(r.size());
            for (const auto& c : r) cells.push_back(format_cell(c));
            out += join(cells);
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open " + path + " for writing");
        f << to_string();
    }

    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    static std::string format_cell(const CsvCell& c) {
        if (std::holds_alternative<double>(c))
            return format_double(std::get<double>(c));
        if (std::holds_alternative<long long>(c))
            return std::to_string(std::get<long long>(c));
        return std::get<std::string>(c);
    }
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        line += '\n';
        return line;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

} // namespace vcoup
