#include "levylab/report.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace levylab {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t x) { return std::to_string(x); }

void Table::add(std::vector<Cell> cells) {
    if (cells.size() != columns.size()) throw std::invalid_argument("table row width does not match the header");
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (auto& c : cells) row.push_back(std::move(c.text));
    rows.push_back(std::move(row));
}

double VerifierReport::statistic(const std::string& key) const {
    for (const auto& [k, v] : statistics)
        if (k == key) return v;
    throw std::out_of_range("report " + claim + " has no statistic " + key);
}

bool VerifierReport::has(const std::string& key) const {
    for (const auto& [k, v] : statistics)
        if (k == key) return true;
    return false;
}

}  // namespace levylab
