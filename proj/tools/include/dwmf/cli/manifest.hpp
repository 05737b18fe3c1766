#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

namespace dwmf::cli {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string iso8601_utc(std::chrono::system_clock::time_point t);

/// File name of the manifest a command writes into its output directory.
std::string manifest_name(const std::string& command);

}  // namespace dwmf::cli
