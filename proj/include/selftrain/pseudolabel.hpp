#pragma once

#include <filesystem>
#include <vector>

#include "selftrain/confidence.hpp"
#include "selftrain/tensor.hpp"

namespace selftrain {

// Selection operates on per-pixel potentials: the raw class probabilities,
// or probabilities weighted by a spatial prior.
struct SelectionMetric {
  enum class Kind { kRaw, kPriorWeighted };
  Kind kind = Kind::kRaw;
  const Tensor3f* prior = nullptr;  // required for kPriorWeighted

  static SelectionMetric raw() { return {}; }
  static SelectionMetric prior_weighted(const Tensor3f& q) {
    return {Kind::kPriorWeighted, &q};
  }
};

// Elementwise q * p, computed once so thresholds and solvers consume
// bit-identical potentials.
Tensor3f prior_weighted_potentials(const ProbMap& m, const Tensor3f& prior);

// Global-threshold selection: a pixel keeps its argmax class when that
// class's potential reaches the reference confidence, and is ignored
// otherwise. `mask`, when given, forces output IGNORE wherever it is IGNORE.
PseudoLabelMap generate_st(const ProbMap& m, const ThresholdSet& t,
                           const LabelMap* mask = nullptr);

// Class-balanced selection: each class's potential is normalized by its own
// reference confidence and the largest ratio wins when it reaches 1.
// Inactive classes never win. Ties go to the lowest class index.
PseudoLabelMap generate_cbst(const Tensor3f& potentials, const ThresholdSet& t,
                             const LabelMap* mask = nullptr);

// Class-balanced selection on prior-weighted potentials. The thresholds must
// also have been determined on prior-weighted potentials.
PseudoLabelMap generate_cbst_sp(const ProbMap& m, const ThresholdSet& t,
                                const Tensor3f& prior,
                                const LabelMap* mask = nullptr);

// Reference solver: enumerates, per pixel, all class assignments plus the
// zero assignment, scoring class c at -log(potential_c) - k_c and the zero
// assignment at 0, and returns the minimizer. Score ties resolve against the
// zero assignment first, then toward the lowest class index. Zero potentials
// score +infinity. Intended for small instances.
PseudoLabelMap oracle_label(const ProbMap& m, const ThresholdSet& t,
                            const SelectionMetric& metric,
                            const LabelMap* mask = nullptr);

// Per-class selection summary across images:
//   class,predicted,selected,portion
// predicted counts argmax-of-potential pixels, selected counts emitted
// pseudo-labels, portion = selected/predicted. A TOTAL row closes the file.
void write_selection_summary_csv(const std::vector<Tensor3f>& potentials,
                                 const std::vector<PseudoLabelMap>& labels,
                                 uint32_t classes,
                                 const std::filesystem::path& path);

}  // namespace selftrain
