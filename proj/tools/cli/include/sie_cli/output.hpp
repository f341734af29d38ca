#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sie::cli {

/// 17 significant digits, enough to round-trip any double.
std::string fmt17(double v);
std::string fmt17(std::optional<double> v);  ///< empty field when absent

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Output directory of one run; remembers every file written to it.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path path(const std::string& name) const { return root_ / name; }

    void write_text(const std::string& name, std::string_view text);
    const std::vector<std::string>& artifacts() const { return artifacts_; }

private:
    std::filesystem::path root_;
    std::vector<std::string> artifacts_;
};

/// Comma-separated rows under a fixed header, built in memory.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void row(const std::vector<std::string>& fields);
    std::string str() const { return text_; }

private:
    std::size_t width_;
    std::string text_;
};

std::string utc_timestamp();

}  // namespace sie::cli
