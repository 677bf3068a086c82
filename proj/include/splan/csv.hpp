#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace splan::csv {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

// Reads all non-empty lines, split by delim. First element is the header row.
inline std::vector<std::vector<std::string>> read_rows(std::istream& in, char delim) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_line(line, delim));
    }
    return rows;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& cells, char delim = ',') {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << delim;
        out << cells[i];
    }
    out << '\n';
}

}  // namespace splan::csv
