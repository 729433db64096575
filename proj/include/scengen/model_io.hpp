#pragma once

#include <filesystem>
#include <string>

#include "scengen/model.hpp"

namespace scengen {

inline constexpr const char* kModelSchema = "scengen.model/1";

std::string model_to_json(const ModelEstimate& theta);
ModelEstimate model_from_json(const std::string& text);

void save_model(const ModelEstimate& theta, const std::filesystem::path& path);
ModelEstimate load_model(const std::filesystem::path& path);

/// Write-temp-then-rename so partially written outputs never appear.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal text for a double (locale-free).
std::string format_double(double v);

}  // namespace scengen
