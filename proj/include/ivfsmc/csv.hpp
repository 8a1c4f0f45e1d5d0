#pragma once

// Minimal CSV I/O: one header row, comma separated, no quoting (fields never
// contain commas). Numbers are written with 17 significant digits so a
// round trip is exact.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ivfsmc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws IoError when absent
    double number(std::size_t row, int col) const;
};

std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);
    void row(const std::vector<double>& values);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ivfsmc
