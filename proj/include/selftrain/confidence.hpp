#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "selftrain/tensor.hpp"

namespace selftrain {

// Reference confidences exp(-k) driving pseudo-label selection. A global
// threshold keeps one value; the per-class form keeps one per class, with
// classes that received no predictions marked inactive (they select nothing
// and their reference value is undefined).
struct ThresholdSet {
  enum class Kind { kGlobal, kPerClass };

  Kind kind = Kind::kGlobal;
  std::vector<double> ref_conf;      // exp(-k); NaN for inactive classes
  std::vector<uint8_t> active;       // parallel to ref_conf
  std::vector<uint64_t> pool_size;   // confidences ranked per entry

  uint32_t classes() const { return static_cast<uint32_t>(ref_conf.size()); }
  bool is_active(uint32_t c) const { return active[c] != 0; }
  double ref(uint32_t c) const { return ref_conf[c]; }
  double k(uint32_t c) const;  // -log(ref_conf)

  static ThresholdSet global(double ref, uint64_t pool);
};

// Portion policy: round r (1-based) selects min(p0 + (r-1)*dp, p_max).
struct PaceSchedule {
  double p0 = 0.2;
  double dp = 0.05;
  double p_max = 0.5;

  void validate() const;
};

// Computed portions snap to a 1e-9 decimal grid; binary accumulation of
// decimal steps like 0.20 + 2*0.05 would otherwise land one ulp off the
// intended value.
double portion_at_round(const PaceSchedule& s, uint32_t round);

// Per-pixel confidence: the maximum class probability.
std::vector<float> pixel_confidence(const ProbMap& m);

// Per-pixel argmax class, ties toward the lowest class index.
LabelMap predicted_labels(const ProbMap& m);

// 1-based rank of the order statistic used as reference confidence:
// round(p * n) half away from zero, clamped to [1, n].
uint64_t selection_rank(double p, uint64_t n);

// Global threshold: the confidence ranked at selection_rank(p, total pixels)
// in descending order over every pixel of every map. Throws on empty input.
ThresholdSet determine_k(const std::vector<const ProbMap*>& targets, double p,
                         unsigned workers = 1);

// Per-class thresholds: ranks each class's confidences over the pixels
// argmax-predicted as that class. Classes with no predictions are inactive.
ThresholdSet determine_kc(const std::vector<const ProbMap*>& targets, double p,
                          unsigned workers = 1);

ThresholdSet determine_k(const std::vector<ProbMap>& targets, double p,
                         unsigned workers = 1);
ThresholdSet determine_kc(const std::vector<ProbMap>& targets, double p,
                          unsigned workers = 1);

// CSV round-trip: header `class,ref_conf,k,active,pixel_count`, one row per
// class (or a single GLOBAL row). ref_conf/k carry full precision so that a
// re-read set selects identically.
void write_thresholds_csv(const ThresholdSet& t,
                          const std::filesystem::path& path);
ThresholdSet read_thresholds_csv(const std::filesystem::path& path);

}  // namespace selftrain
