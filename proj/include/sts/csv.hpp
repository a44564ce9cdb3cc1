#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "sts/errors.hpp"

namespace sts::csv {

// Shortest text form that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw Error("csv column not found: " + name);
    }
};

inline void write(const std::string& path,
                  const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) f << ',';
        f << header[i];
    }
    f << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ',';
            f << format_double(row[i]);
        }
        f << '\n';
    }
    if (!f) throw Error("write failed: " + path);
}

inline Table read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open for reading: " + path);
    Table t;
    std::string line;
    if (!std::getline(f, line)) throw Error("empty csv: " + path);
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t next = line.find(',', pos);
        if (next == std::string::npos) next = line.size();
        t.header.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(t.header.size());
        const char* s = line.c_str();
        char* end = nullptr;
        while (true) {
            row.push_back(std::strtod(s, &end));
            if (s == end) throw Error("bad number in " + path + ": " + line);
            if (*end == ',')
                s = end + 1;
            else
                break;
        }
        if (row.size() != t.header.size())
            throw Error("ragged csv row in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace sts::csv
