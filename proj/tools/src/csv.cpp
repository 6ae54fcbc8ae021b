#include "svi_cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "svi_cli/config.hpp"

namespace svi::cli {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

Cell::Cell(double v) : text_(format_double(v)) {}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     std::vector<std::string> columns)
    : path_(path), columns_(columns.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out_ << "# config_hash=" << config_hash << " version=" << kVersion << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i].text();
    out_ << '\n';
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
    out_.close();
}

}  // namespace svi::cli
