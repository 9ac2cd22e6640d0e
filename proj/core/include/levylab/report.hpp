#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levylab/rng.hpp"

namespace levylab {

// Shortest round-trip decimal form; identical bits give identical text.
std::string format_number(double x);
std::string format_number(std::uint64_t x);

// Raw statistics behind a report, one row per estimate. Cells are stored as
// text so that the CSV body is fixed at construction.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    struct Cell {
        std::string text;
        Cell(double x) : text(format_number(x)) {}
        Cell(std::size_t x) : text(format_number(static_cast<std::uint64_t>(x))) {}
        Cell(int x) : text(std::to_string(x)) {}
        Cell(bool x) : text(x ? "1" : "0") {}
        Cell(std::string s) : text(std::move(s)) {}
        Cell(const char* s) : text(s) {}
    };

    void add(std::vector<Cell> cells);
};

struct VerifierReport {
    std::string claim;
    bool pass = false;
    // Headline statistic and, when there is one, its confidence interval.
    std::string key_statistic;
    std::optional<std::pair<double, double>> interval;
    std::vector<std::pair<std::string, double>> statistics;
    std::vector<std::pair<std::string, std::string>> parameters;
    // Master stream of the run; rerunning with it reproduces the report.
    RngStream rng;
    std::string note;
    Table table;

    void stat(const std::string& key, double value) { statistics.emplace_back(key, value); }
    void param(const std::string& key, const std::string& value) { parameters.emplace_back(key, value); }
    void param(const std::string& key, double value) { parameters.emplace_back(key, format_number(value)); }
    double statistic(const std::string& key) const;
    bool has(const std::string& key) const;
    double key_value() const { return statistic(key_statistic); }
};

}  // namespace levylab
