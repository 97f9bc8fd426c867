#pragma once

#include <cstdint>
#include <vector>

#include "selftrain/error.hpp"

namespace selftrain {

inline constexpr uint8_t kIgnoreLabel = 255;

// Dense channel-major float field over an image grid. Serves as the storage
// for class-probability maps (channels = classes), per-pixel feature vectors
// (channels = feature dim) and spatial prior planes.
struct Tensor3f {
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<float> data;  // [(c * height + r) * width + col]

  Tensor3f() = default;
  Tensor3f(uint32_t c, uint32_t h, uint32_t w, float fill = 0.0f)
      : channels(c), height(h), width(w),
        data(static_cast<size_t>(c) * h * w, fill) {}

  float at(uint32_t c, uint32_t r, uint32_t col) const {
    return data[(static_cast<size_t>(c) * height + r) * width + col];
  }
  float& at(uint32_t c, uint32_t r, uint32_t col) {
    return data[(static_cast<size_t>(c) * height + r) * width + col];
  }

  size_t pixels() const { return static_cast<size_t>(height) * width; }
  size_t size() const { return data.size(); }

  bool same_shape(const Tensor3f& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }

  bool operator==(const Tensor3f& o) const = default;
};

// Per-pixel class assignments. `classes` records the class count the map was
// produced against; values must be < classes or the ignore sentinel.
struct LabelMap {
  uint32_t classes = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<uint8_t> values;  // row-major [r * width + col]

  LabelMap() = default;
  LabelMap(uint32_t c, uint32_t h, uint32_t w, uint8_t fill = kIgnoreLabel)
      : classes(c), height(h), width(w),
        values(static_cast<size_t>(h) * w, fill) {}

  uint8_t at(uint32_t r, uint32_t col) const {
    return values[static_cast<size_t>(r) * width + col];
  }
  uint8_t& at(uint32_t r, uint32_t col) {
    return values[static_cast<size_t>(r) * width + col];
  }

  size_t pixels() const { return static_cast<size_t>(height) * width; }

  bool operator==(const LabelMap& o) const = default;
};

using ProbMap = Tensor3f;       // channels = classes, per-pixel simplex
using FeatureImage = Tensor3f;  // channels = feature dimension
using PseudoLabelMap = LabelMap;

inline constexpr double kProbSumTolerance = 1e-4;

// Throws validation_error unless every value is in [0, 1] and each pixel's
// class probabilities sum to 1 within kProbSumTolerance. C >= 2 required.
void validate_prob_map(const Tensor3f& m);

// Throws validation_error if any non-ignore value is >= m.classes.
void validate_label_map(const LabelMap& m);

}  // namespace selftrain
