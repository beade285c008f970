#pragma once

#include <span>
#include <string>

#include "symito/process.hpp"

namespace symito {

/// Binary batch store: one paths.bin per directory (header with version and
/// grid metadata, then fixed-width records) plus a JSON manifest stub.
/// Round trips are lossless including the jump ledger and seed; loading a
/// file with a different format version is refused.
inline constexpr std::uint32_t kPathStoreVersion = 1;

void store_paths(std::span<const SamplePath> paths, const std::string& dir,
                 const ProcessSpec* spec_echo = nullptr);
std::vector<SamplePath> load_paths(const std::string& dir);

/// Debug view of a batch as CSV (one row per grid point).
void export_paths_csv(std::span<const SamplePath> paths,
                      const std::string& file);

}  // namespace symito
