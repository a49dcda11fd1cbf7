#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "forgan/model/forgan_model.hpp"

namespace forgan::model {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Model container, little-endian:
///   8 bytes  magic "FORGANMD"
///   u32      format version
///   u64      header length L
///   L bytes  JSON header: kind, hyper, scaler, tensors [{name, shape}] in storage order
///   f64[]    every tensor's values, row-major, in header order
///   u64      FNV-1a 64 checksum of all preceding bytes
std::vector<std::uint8_t> serialize_model(const ForGanModel& model);
/// Throws FormatError on a bad magic, version, checksum, size or tensor layout.
ForGanModel deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const ForGanModel& model, const std::filesystem::path& path);
ForGanModel load_model(const std::filesystem::path& path);

}  // namespace forgan::model
