// io.hpp: deterministic text output. CSV with '.' decimal point and 17
// significant digits; provenance comment lines ahead of the header.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qotto::io {

std::string format_g17(double v);

// Writes '#'-prefixed provenance lines, one header row, then data rows.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& provenance,
               const std::string& header, const std::vector<std::vector<std::string>>& rows);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace qotto::io
