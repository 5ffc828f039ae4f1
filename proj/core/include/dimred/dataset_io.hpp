#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dimred/clustering.hpp"

namespace dimred {

/// One point per row, comma-separated float64 columns. Blank lines and lines
/// starting with '#' are skipped.
Dataset dataset_from_csv(std::string_view text);
std::string dataset_to_csv(const Dataset& data);

/// {"dim": m, "points": [[...], ...], "ids": [...]?, "labels": [...]?}
Dataset dataset_from_json(std::string_view text);
std::string to_json(const Dataset& data);

/// Dispatches on extension: ".json" is JSON, anything else CSV.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

/// {"k": k, "assignment": [...]}; a bare array is accepted with k = max + 1.
Clustering clustering_from_json(std::string_view text);
std::string to_json(const Clustering& clustering);

std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories; throws std::runtime_error if the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dimred
