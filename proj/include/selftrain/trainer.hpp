#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "selftrain/confidence.hpp"
#include "selftrain/pseudolabel.hpp"
#include "selftrain/tensor.hpp"

namespace selftrain {

// Per-pixel softmax classifier over feature vectors: either linear
// (hidden == 0) or one tanh hidden layer. Parameters are kept in double for
// exact gradient checks; quantize_to_f32 rounds the state to what the
// float32 container persists, so a saved file reproduces the in-memory model
// bit-exactly.
struct ClassifierParams {
  uint32_t feat_dim = 0;
  uint32_t hidden = 0;  // 0 = linear
  uint32_t classes = 0;
  uint64_t seed = 0;
  double learning_rate = 1e-3;

  // linear: w1 is classes x feat_dim, b1 has classes entries.
  // hidden:  w1 is hidden x feat_dim, b1 hidden, w2 classes x hidden, b2 classes.
  std::vector<double> w1, b1, w2, b2;

  static ClassifierParams init(uint32_t feat_dim, uint32_t classes,
                               uint32_t hidden, uint64_t seed,
                               double learning_rate);
  void quantize_to_f32();
  size_t weight_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }

  bool operator==(const ClassifierParams& o) const = default;
};

// Container: magic "SPRM", u32 version, u32 feat_dim, u32 hidden,
// u32 classes, u64 seed, f64 learning rate, then float32 weights in
// w1, b1, w2, b2 order (little-endian). Callers wanting file == memory run
// quantize_to_f32 first.
void save_params(const ClassifierParams& p, const std::filesystem::path& path);
ClassifierParams load_params(const std::filesystem::path& path);

struct ImageBatch {
  const Tensor3f* features = nullptr;
  const LabelMap* labels = nullptr;  // ground truth or pseudo-labels
};

struct LossReport {
  double total = 0.0;
  double source_term = 0.0;
  double target_term = 0.0;
  double regularizer_term = 0.0;  // -sum of k over selected pixels
  std::vector<uint64_t> selected_per_class;
  uint64_t source_pixels = 0;
};

// Softmax probabilities for every pixel; max-subtracted for stability.
ProbMap forward(const ClassifierParams& p, const FeatureImage& img,
                unsigned workers = 1);

// Cross-entropy over non-ignore pixels, summed.
LossReport loss_supervised(const ClassifierParams& p,
                           const std::vector<ImageBatch>& batches,
                           unsigned workers = 1);

// Source cross-entropy plus target cross-entropy over pseudo-labeled pixels
// minus the per-pixel k of each selected class. With a prior-weighted metric
// the target term scores -log(q * p); the prior is a constant inside the log
// and never reaches gradients. Pseudo-labels of inactive classes are
// rejected.
LossReport loss_selftrain(const ClassifierParams& p,
                          const std::vector<ImageBatch>& source,
                          const std::vector<ImageBatch>& target,
                          const ThresholdSet& t, const SelectionMetric& metric,
                          unsigned workers = 1);

struct Gradients {
  std::vector<double> w1, b1, w2, b2;
};

// Exact gradient of the cross-entropy terms (sum reduction) over all
// non-ignore pixels of both batch lists.
Gradients gradients(const ClassifierParams& p,
                    const std::vector<ImageBatch>& source,
                    const std::vector<ImageBatch>& target);

struct TrainOptions {
  uint32_t epochs = 1;
  uint64_t seed = 0;
  unsigned workers = 1;  // loss evaluation only; updates are sequential

  // Rare-class mining: target batches train on a crop anchored at a rare
  // pseudo-labeled pixel when one exists.
  bool mining = false;
  std::vector<uint8_t> rare_classes;
  uint32_t crop_h = 0, crop_w = 0;
};

struct EpochStats {
  double total = 0.0;
  double source_term = 0.0;
  double target_term = 0.0;
  double regularizer_term = 0.0;
};

// Mini-batch SGD: one image per batch, mean-reduced gradients, images
// visited in a seeded shuffle per epoch. The trace holds the full objective
// after each epoch. Aborts with a diagnostic when the loss stops being
// finite or exceeds 1e6. `t`/`metric` are only consulted for reporting; pass
// t == nullptr when target is empty.
std::vector<EpochStats> train_epochs(ClassifierParams& p,
                                     const std::vector<ImageBatch>& source,
                                     const std::vector<ImageBatch>& target,
                                     const ThresholdSet* t,
                                     const SelectionMetric& metric,
                                     const TrainOptions& opt);

}  // namespace selftrain
