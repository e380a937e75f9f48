#include "depmix/csv.hpp"

#include <cstdio>

#include "depmix/errors.hpp"

namespace depmix::csv {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
    if (!out_) {
        throw Error("cannot open " + path.string());
    }
    row(header);
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) {
        throw Error("csv row width mismatch");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            out_ << ',';
        }
        out_ << cells[i];
    }
    out_ << '\n';
}

void Writer::row_values(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) {
        s.push_back(format_number(v));
    }
    row(s);
}

std::string cell(std::int64_t v) {
    return std::to_string(v);
}

std::string cell(double v) {
    return format_number(v);
}

std::string cell(const std::string& v) {
    return v;
}

std::string cell(bool v) {
    return v ? "true" : "false";
}

} // namespace depmix::csv
