#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace evplan::csv {

/// A parsed CSV file: header plus rows of raw string fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row

    /// Column index by name (case-sensitive); -1 if absent.
    int column(std::string_view name) const;
};

/// Splits one line on commas, honouring double-quoted fields.
std::vector<std::string> split_line(std::string_view line);

/// Reads a CSV with a header row. Blank lines and lines starting with '#'
/// are skipped. Throws InputDataError when the file cannot be opened.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, const std::string& source_name = "<memory>");

double to_double(const std::string& field, const std::string& context);

/// Fixed-decimal formatting, locale-independent.
std::string fixed(double v, int decimals);

}  // namespace evplan::csv
