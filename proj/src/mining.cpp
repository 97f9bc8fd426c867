#include "selftrain/mining.hpp"

#include <algorithm>

namespace selftrain {

std::vector<double> class_portions(const std::vector<const LabelMap*>& preds,
                                   uint32_t classes) {
  std::vector<uint64_t> counts(classes, 0);
  uint64_t total = 0;
  for (const auto* m : preds) {
    for (uint8_t v : m->values) {
      if (v == kIgnoreLabel) continue;
      if (v >= classes)
        throw validation_error("prediction value exceeds class count");
      ++counts[v];
      ++total;
    }
  }
  if (total == 0) throw validation_error("no predictions to count");
  std::vector<double> portions(classes);
  for (uint32_t c = 0; c < classes; ++c)
    portions[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  return portions;
}

std::vector<double> class_portions(const std::vector<LabelMap>& preds,
                                   uint32_t classes) {
  std::vector<const LabelMap*> ptrs;
  ptrs.reserve(preds.size());
  for (const auto& m : preds) ptrs.push_back(&m);
  return class_portions(ptrs, classes);
}

std::vector<uint8_t> rare_classes(const std::vector<double>& portions,
                                  double threshold) {
  std::vector<uint8_t> rare(portions.size(), 0);
  for (size_t c = 0; c < portions.size(); ++c)
    rare[c] = portions[c] < threshold ? 1 : 0;
  return rare;
}

CropRect prioritized_crop(const PseudoLabelMap& pseudo,
                          const std::vector<uint8_t>& rare, uint32_t crop_h,
                          uint32_t crop_w, Rng& rng) {
  if (crop_h == 0 || crop_h > pseudo.height || crop_w == 0 ||
      crop_w > pseudo.width)
    throw validation_error("crop does not fit image");

  std::vector<uint32_t> anchors;
  for (uint32_t px = 0; px < pseudo.pixels(); ++px) {
    const uint8_t v = pseudo.values[px];
    if (v != kIgnoreLabel && v < rare.size() && rare[v]) anchors.push_back(px);
  }

  CropRect crop{0, 0, crop_h, crop_w};
  if (anchors.empty()) {
    crop.top = static_cast<uint32_t>(rng.below(pseudo.height - crop_h + 1));
    crop.left = static_cast<uint32_t>(rng.below(pseudo.width - crop_w + 1));
    return crop;
  }
  const uint32_t px = anchors[rng.below(anchors.size())];
  const uint32_t r = px / pseudo.width, c = px % pseudo.width;
  const uint32_t top_lo = r + 1 >= crop_h ? r + 1 - crop_h : 0;
  const uint32_t top_hi = std::min(r, pseudo.height - crop_h);
  const uint32_t left_lo = c + 1 >= crop_w ? c + 1 - crop_w : 0;
  const uint32_t left_hi = std::min(c, pseudo.width - crop_w);
  crop.top = top_lo + static_cast<uint32_t>(rng.below(top_hi - top_lo + 1));
  crop.left = left_lo + static_cast<uint32_t>(rng.below(left_hi - left_lo + 1));
  return crop;
}

}  // namespace selftrain
