#pragma once

// Shared helpers for the whitespace-separated text formats.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fiberline {

/// Yields whitespace-split records, skipping blank lines and `#` comments.
class LineReader {
  public:
    explicit LineReader(std::string_view text) : text_(text) {}

    std::optional<std::vector<std::string_view>> next_record();
    std::size_t line_number() const { return line_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

double parse_real(std::string_view token, std::size_t line);
std::size_t parse_count(std::string_view token, std::size_t line);

/// 17 significant digits, so the text round-trips exactly.
std::string format_real(double v);

void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace fiberline
