#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace svi::cli {

/// A CSV cell: doubles print with 17 significant digits.
class Cell {
public:
    Cell(double v);
    Cell(int v) : text_(std::to_string(v)) {}
    Cell(long v) : text_(std::to_string(v)) {}
    Cell(unsigned long v) : text_(std::to_string(v)) {}
    Cell(unsigned long long v) : text_(std::to_string(v)) {}
    Cell(std::string v) : text_(std::move(v)) {}
    Cell(const char* v) : text_(v) {}

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

/// One writer per file: comment line with the config hash, header, then rows.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& config_hash, std::vector<std::string> columns);

    void row(const std::vector<Cell>& cells);
    /// Flushes and throws std::runtime_error if any write failed.
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

std::string format_double(double v);

}  // namespace svi::cli
