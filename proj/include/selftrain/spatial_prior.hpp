#pragma once

#include <cstdint>
#include <vector>

#include "selftrain/tensor.hpp"

namespace selftrain {

// Per-class spatial frequency field. Each class plane sums to 1 over the
// image grid; classes never observed stay all-zero and are flagged absent.
struct SpatialPrior {
  Tensor3f q;
  uint32_t kernel_size = 71;
  double sigma = 0.0;
  std::vector<uint8_t> present;

  bool is_present(uint32_t c) const { return present[c] != 0; }
};

// count(c, r, col) = number of maps labeling (r, col) as c. Ignored pixels
// contribute nothing. All maps must share one spatial extent.
Tensor3f accumulate_frequencies(const std::vector<const LabelMap*>& labels,
                                uint32_t classes);
Tensor3f accumulate_frequencies(const std::vector<LabelMap>& labels,
                                uint32_t classes);

// Separable truncated-Gaussian smoothing of each class plane. The kernel is
// renormalized over its in-bounds support at the borders, so constant fields
// pass through unchanged. kernel_size must be odd and fit the image.
Tensor3f gaussian_smooth(const Tensor3f& counts, uint32_t kernel_size,
                         double sigma, unsigned workers = 1);

// Divides each class plane by its total mass. Throws when every plane is
// zero; individual zero planes stay zero and are flagged absent.
SpatialPrior normalize_prior(const Tensor3f& smoothed);

// accumulate -> smooth -> normalize. sigma <= 0 selects kernel_size / 6.
SpatialPrior build_spatial_prior(const std::vector<const LabelMap*>& labels,
                                 uint32_t classes, uint32_t kernel_size = 71,
                                 double sigma = 0.0, unsigned workers = 1);

// Bilinear resample to a new grid followed by per-class renormalization.
SpatialPrior resample_prior(const SpatialPrior& prior, uint32_t height,
                            uint32_t width);

}  // namespace selftrain
