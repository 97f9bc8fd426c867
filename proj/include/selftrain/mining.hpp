#pragma once

#include <cstdint>
#include <vector>

#include "selftrain/rng.hpp"
#include "selftrain/tensor.hpp"

namespace selftrain {

// Fraction of pixels argmax-predicted per class across the given prediction
// maps. Sums to 1.
std::vector<double> class_portions(const std::vector<const LabelMap*>& preds,
                                   uint32_t classes);
std::vector<double> class_portions(const std::vector<LabelMap>& preds,
                                   uint32_t classes);

// Flags classes whose predicted portion falls strictly below the threshold.
std::vector<uint8_t> rare_classes(const std::vector<double>& portions,
                                  double threshold);

struct CropRect {
  uint32_t top = 0, left = 0, height = 0, width = 0;
};

// Crop selection biased toward rare classes: when any pixel carries a rare
// pseudo-label, a uniformly drawn such pixel anchors the crop and a valid
// covering rectangle is drawn uniformly; otherwise the crop is uniform over
// all valid positions.
CropRect prioritized_crop(const PseudoLabelMap& pseudo,
                          const std::vector<uint8_t>& rare, uint32_t crop_h,
                          uint32_t crop_w, Rng& rng);

}  // namespace selftrain
