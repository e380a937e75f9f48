#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace depmix::csv {

// Deterministic number formatting shared by all report writers; two runs
// with the same seed must produce byte-identical files.
std::string format_number(double v);

class Writer {
  public:
    Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

    // Convenience: formats doubles with format_number.
    void row_values(const std::vector<double>& cells);

  private:
    std::ofstream out_;
    std::size_t width_;
};

std::string cell(std::int64_t v);
std::string cell(double v);
std::string cell(const std::string& v);
std::string cell(bool v);

} // namespace depmix::csv
