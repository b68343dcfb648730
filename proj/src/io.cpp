#include "qotto/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qotto::io {

std::string format_g17(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& provenance,
               const std::string& header, const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    for (const std::string& line : provenance) os << "# " << line << "\n";
    os << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << "\n";
    }
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    os << content;
}

}  // namespace qotto::io
