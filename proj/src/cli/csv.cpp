#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "spinsense/cli.hpp"

namespace spinsense::cli {

void Table::add_row(std::vector<double> row)
{
    if (row.size() != columns.size())
        throw std::logic_error("table row has " + std::to_string(row.size()) + " cells for " +
                               std::to_string(columns.size()) + " columns");
    for (std::size_t i = 0; i < row.size(); ++i)
        if (!std::isfinite(row[i]))
            throw std::domain_error("non-finite value in column '" + columns[i].name + "'");
    rows.push_back(std::move(row));
}

std::string format_number(double v)
{
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

std::string render_csv(const Table& table)
{
    std::string out;
    for (const auto& c : table.comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i].name + " [" + table.columns[i].unit + "]";
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_output(const std::string& dir, const Output& out)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    const auto base = std::filesystem::path(dir) / out.name;
    {
        std::ofstream f(base.string() + ".csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + base.string() + ".csv");
        f << render_csv(out.table);
    }
    std::ofstream f(base.string() + ".json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + base.string() + ".json");
    f << out.metadata.dump(2) << '\n';
}

}  // namespace spinsense::cli
