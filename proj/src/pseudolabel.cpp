#include "selftrain/pseudolabel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace selftrain {

Tensor3f prior_weighted_potentials(const ProbMap& m, const Tensor3f& prior) {
  if (!m.same_shape(prior))
    throw validation_error("prior dimensions do not match probability map");
  Tensor3f pot(m.channels, m.height, m.width);
  for (size_t i = 0; i < m.data.size(); ++i)
    pot.data[i] = m.data[i] * prior.data[i];
  return pot;
}

namespace {

bool masked(const LabelMap* mask, size_t px) {
  return mask && mask->values[px] == kIgnoreLabel;
}

void check_mask(const Tensor3f& m, const LabelMap* mask) {
  if (mask && (mask->height != m.height || mask->width != m.width))
    throw validation_error("mask dimensions do not match map");
}

}  // namespace

PseudoLabelMap generate_st(const ProbMap& m, const ThresholdSet& t,
                           const LabelMap* mask) {
  if (t.kind != ThresholdSet::Kind::kGlobal)
    throw validation_error("generate_st needs a global threshold");
  check_mask(m, mask);
  const double ref = t.ref(0);
  const size_t plane = m.pixels();
  PseudoLabelMap out(m.channels, m.height, m.width, kIgnoreLabel);
  for (size_t px = 0; px < plane; ++px) {
    if (masked(mask, px)) continue;
    uint32_t arg = 0;
    float best = m.data[px];
    for (uint32_t c = 1; c < m.channels; ++c) {
      const float v = m.data[static_cast<size_t>(c) * plane + px];
      if (v > best) {
        best = v;
        arg = c;
      }
    }
    if (static_cast<double>(best) >= ref)
      out.values[px] = static_cast<uint8_t>(arg);
  }
  return out;
}

PseudoLabelMap generate_cbst(const Tensor3f& potentials, const ThresholdSet& t,
                             const LabelMap* mask) {
  if (t.kind != ThresholdSet::Kind::kPerClass)
    throw validation_error("generate_cbst needs per-class thresholds");
  if (t.classes() != potentials.channels)
    throw validation_error("threshold class count does not match map");
  check_mask(potentials, mask);
  const size_t plane = potentials.pixels();
  PseudoLabelMap out(potentials.channels, potentials.height, potentials.width,
                     kIgnoreLabel);
  for (size_t px = 0; px < plane; ++px) {
    if (masked(mask, px)) continue;
    int arg = -1;
    double best = -1.0;
    for (uint32_t c = 0; c < potentials.channels; ++c) {
      if (!t.is_active(c)) continue;
      const double r =
          static_cast<double>(
              potentials.data[static_cast<size_t>(c) * plane + px]) /
          t.ref(c);
      if (r > best) {
        best = r;
        arg = static_cast<int>(c);
      }
    }
    if (arg >= 0 && best >= 1.0) out.values[px] = static_cast<uint8_t>(arg);
  }
  return out;
}

PseudoLabelMap generate_cbst_sp(const ProbMap& m, const ThresholdSet& t,
                                const Tensor3f& prior, const LabelMap* mask) {
  return generate_cbst(prior_weighted_potentials(m, prior), t, mask);
}

PseudoLabelMap oracle_label(const ProbMap& m, const ThresholdSet& t,
                            const SelectionMetric& metric,
                            const LabelMap* mask) {
  const Tensor3f* pot = &m;
  Tensor3f weighted;
  if (metric.kind == SelectionMetric::Kind::kPriorWeighted) {
    if (!metric.prior)
      throw validation_error("prior-weighted metric needs a prior");
    weighted = prior_weighted_potentials(m, *metric.prior);
    pot = &weighted;
  }
  const bool global = t.kind == ThresholdSet::Kind::kGlobal;
  if (!global && t.classes() != pot->channels)
    throw validation_error("threshold class count does not match map");
  check_mask(*pot, mask);

  std::vector<double> k_of(pot->channels);
  for (uint32_t c = 0; c < pot->channels; ++c) {
    const uint32_t tc = global ? 0 : c;
    k_of[c] = t.is_active(tc) ? t.k(tc)
                              : std::numeric_limits<double>::quiet_NaN();
  }

  const size_t plane = pot->pixels();
  PseudoLabelMap out(pot->channels, pot->height, pot->width, kIgnoreLabel);
  for (size_t px = 0; px < plane; ++px) {
    if (masked(mask, px)) continue;
    int arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (uint32_t c = 0; c < pot->channels; ++c) {
      if (std::isnan(k_of[c])) continue;
      const double v = pot->data[static_cast<size_t>(c) * plane + px];
      const double score =
          v > 0.0 ? -std::log(v) - k_of[c]
                  : std::numeric_limits<double>::infinity();
      if (score < best) {
        best = score;
        arg = static_cast<int>(c);
      }
    }
    // Zero assignment scores 0 and loses ties.
    if (arg >= 0 && best <= 0.0) out.values[px] = static_cast<uint8_t>(arg);
  }
  return out;
}

void write_selection_summary_csv(const std::vector<Tensor3f>& potentials,
                                 const std::vector<PseudoLabelMap>& labels,
                                 uint32_t classes,
                                 const std::filesystem::path& path) {
  if (potentials.size() != labels.size())
    throw validation_error("selection summary inputs disagree in length");
  std::vector<uint64_t> predicted(classes, 0), selected(classes, 0);
  uint64_t total = 0;
  for (size_t i = 0; i < potentials.size(); ++i) {
    const Tensor3f& pot = potentials[i];
    const size_t plane = pot.pixels();
    total += plane;
    for (size_t px = 0; px < plane; ++px) {
      uint32_t arg = 0;
      float bestv = pot.data[px];
      for (uint32_t c = 1; c < pot.channels; ++c) {
        const float v = pot.data[static_cast<size_t>(c) * plane + px];
        if (v > bestv) {
          bestv = v;
          arg = c;
        }
      }
      ++predicted[arg];
      const uint8_t lab = labels[i].values[px];
      if (lab != kIgnoreLabel) ++selected[lab];
    }
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out << "class,predicted,selected,portion\n";
  char buf[32];
  uint64_t sel_total = 0;
  for (uint32_t c = 0; c < classes; ++c) {
    sel_total += selected[c];
    if (predicted[c] > 0)
      std::snprintf(buf, sizeof buf, "%.6f",
                    static_cast<double>(selected[c]) /
                        static_cast<double>(predicted[c]));
    else
      std::snprintf(buf, sizeof buf, "nan");
    out << c << ',' << predicted[c] << ',' << selected[c] << ',' << buf
        << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.6f",
                total ? static_cast<double>(sel_total) /
                            static_cast<double>(total)
                      : 0.0);
  out << "TOTAL," << total << ',' << sel_total << ',' << buf << '\n';
  if (!out) throw io_error("short write to " + path.string());
}

}  // namespace selftrain
