#include "selftrain/tensor.hpp"

#include <cmath>
#include <string>

namespace selftrain {

void validate_prob_map(const Tensor3f& m) {
  if (m.channels < 2)
    throw validation_error("probability map needs at least 2 classes, got " +
                           std::to_string(m.channels));
  if (m.height < 1 || m.width < 1)
    throw validation_error("probability map has empty spatial extent");
  const size_t plane = m.pixels();
  for (size_t p = 0; p < plane; ++p) {
    double sum = 0.0;
    for (uint32_t c = 0; c < m.channels; ++c) {
      const float v = m.data[static_cast<size_t>(c) * plane + p];
      if (!(v >= 0.0f && v <= 1.0f))
        throw validation_error("probability value out of [0,1]: " +
                               std::to_string(v));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance)
      throw validation_error("pixel probabilities sum to " +
                             std::to_string(sum) + ", expected 1 within 1e-4");
  }
}

void validate_label_map(const LabelMap& m) {
  for (uint8_t v : m.values) {
    if (v != kIgnoreLabel && v >= m.classes)
      throw validation_error("label value " + std::to_string(v) +
                             " out of range for " + std::to_string(m.classes) +
                             " classes");
  }
}

}  // namespace selftrain
