#pragma once

#include <filesystem>

#include "forgan/data/dataset.hpp"

namespace forgan::data {

/// Companion metadata path: "dataset.csv" -> "dataset.meta.json".
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);

/// Writes the window CSV (header c0..c{C-1},target[,cluster]) and its JSON metadata
/// (scaler, split indices, provenance). Values are written in shortest round-trip form,
/// so identical datasets produce identical bytes.
void write_dataset(const WindowedDataset& ds, const std::filesystem::path& csv_path);

/// Reads a dataset written by `write_dataset`. Throws DataError for missing or malformed
/// files and FormatError when the metadata disagrees with the CSV.
WindowedDataset read_dataset(const std::filesystem::path& csv_path);

}  // namespace forgan::data
