#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "selftrain/tensor.hpp"

namespace selftrain {

// PMAP/LMAP container (little-endian throughout):
//
//   offset  size  field
//   0       4     magic: "PMAP" (float maps) or "LMAP" (label maps)
//   4       4     u32 format version (currently 1)
//   8       4     u32 dtype: 1 = float32, 2 = uint8
//   12      4     u32 semantics: 0 = probability, 1 = prior, 2 = feature
//   16      4     u32 channels (classes C, or feature dim; class count for LMAP)
//   20      4     u32 height
//   24      4     u32 width
//   28      ...   payload, row-major within channel, channel-major
//
// Probability semantics are validated on load: values in [0, 1] and per-pixel
// class sums within kProbSumTolerance of 1. Prior payloads are validated
// nonnegative, feature payloads finite. Label payloads must be < channels or
// the 255 ignore sentinel.

enum class MapSemantics : uint32_t {
  kProbability = 0,
  kPrior = 1,
  kFeature = 2,
};

void save_prob_map(const ProbMap& m, const std::filesystem::path& path);
ProbMap load_prob_map(const std::filesystem::path& path);

void save_label_map(const LabelMap& m, const std::filesystem::path& path);
LabelMap load_label_map(const std::filesystem::path& path);

// Prior / feature variants share the PMAP container with a semantics tag.
void save_dense_map(const Tensor3f& m, MapSemantics sem,
                    const std::filesystem::path& path);
Tensor3f load_dense_map(const std::filesystem::path& path, MapSemantics* sem);

// Writes the container without value validation. Tests use this to produce
// deliberately invalid files and probability maps with bypassed invariants.
void save_dense_map_unchecked(const Tensor3f& m, MapSemantics sem,
                              const std::filesystem::path& path);

// Reads only the header. Used for manifest cross-checks.
struct MapHeader {
  char magic[5] = {0};
  uint32_t version = 0;
  uint32_t dtype = 0;
  MapSemantics semantics = MapSemantics::kProbability;
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;
};
MapHeader read_map_header(const std::filesystem::path& path);

// Dataset manifest: UTF-8 text, one record per line, tab-separated. Lines
// starting with '#' are comments. The first data line declares the classes:
//
//   classes<TAB>name_0<TAB>name_1...
//
// Records follow, "-" marking an absent path:
//
//   id<TAB>source|target<TAB>prob_path<TAB>label_path[<TAB>feat_path]
//
// Paths are resolved relative to the manifest's directory.
struct ManifestRecord {
  std::string id;
  bool is_source = false;
  std::filesystem::path prob_path;   // empty when "-"
  std::filesystem::path label_path;  // empty when "-"
  std::filesystem::path feat_path;   // empty when "-"
};

struct Manifest {
  uint32_t classes = 0;
  std::vector<std::string> class_names;
  std::vector<ManifestRecord> records;

  size_t source_count() const;
  size_t target_count() const;
  std::vector<const ManifestRecord*> sources() const;
  std::vector<const ManifestRecord*> targets() const;
};

// Validates ids unique, roles well-formed, referenced files present and
// header-consistent with the declared class count.
Manifest read_manifest(const std::filesystem::path& path);

void write_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace selftrain
