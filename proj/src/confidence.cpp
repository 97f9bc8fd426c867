#include "selftrain/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "selftrain/parallel.hpp"

namespace selftrain {

double ThresholdSet::k(uint32_t c) const { return -std::log(ref_conf[c]); }

ThresholdSet ThresholdSet::global(double ref, uint64_t pool) {
  ThresholdSet t;
  t.kind = Kind::kGlobal;
  t.ref_conf = {ref};
  t.active = {1};
  t.pool_size = {pool};
  return t;
}

void PaceSchedule::validate() const {
  if (!(p0 > 0.0) || !(p0 <= p_max) || !(p_max <= 1.0) || !(dp >= 0.0))
    throw validation_error("pace schedule requires 0 < p0 <= p_max <= 1 and dp >= 0");
}

double portion_at_round(const PaceSchedule& s, uint32_t round) {
  if (round < 1) throw validation_error("rounds are 1-based");
  const double raw = s.p0 + static_cast<double>(round - 1) * s.dp;
  const double snapped = std::llround(raw * 1e9) / 1e9;
  return std::min(snapped, s.p_max);
}

std::vector<float> pixel_confidence(const ProbMap& m) {
  const size_t plane = m.pixels();
  std::vector<float> conf(plane);
  for (size_t p = 0; p < plane; ++p) {
    float best = m.data[p];
    for (uint32_t c = 1; c < m.channels; ++c)
      best = std::max(best, m.data[static_cast<size_t>(c) * plane + p]);
    conf[p] = best;
  }
  return conf;
}

LabelMap predicted_labels(const ProbMap& m) {
  const size_t plane = m.pixels();
  LabelMap out(m.channels, m.height, m.width, 0);
  for (size_t p = 0; p < plane; ++p) {
    uint32_t arg = 0;
    float best = m.data[p];
    for (uint32_t c = 1; c < m.channels; ++c) {
      const float v = m.data[static_cast<size_t>(c) * plane + p];
      if (v > best) {  // strict: ties keep the lowest index
        best = v;
        arg = c;
      }
    }
    out.values[p] = static_cast<uint8_t>(arg);
  }
  return out;
}

uint64_t selection_rank(double p, uint64_t n) {
  const uint64_t r = static_cast<uint64_t>(std::llround(p * static_cast<double>(n)));
  return std::clamp<uint64_t>(r, 1, n);
}

namespace {

void check_portion(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw validation_error("portion must lie in (0, 1]");
}

// Value at 1-based descending rank, via nth_element.
float value_at_rank(std::vector<float>& pool, uint64_t rank) {
  auto nth = pool.begin() + static_cast<ptrdiff_t>(rank - 1);
  std::nth_element(pool.begin(), nth, pool.end(), std::greater<float>());
  return *nth;
}

std::vector<const ProbMap*> as_pointers(const std::vector<ProbMap>& maps) {
  std::vector<const ProbMap*> out;
  out.reserve(maps.size());
  for (const auto& m : maps) out.push_back(&m);
  return out;
}

}  // namespace

ThresholdSet determine_k(const std::vector<const ProbMap*>& targets, double p,
                         unsigned workers) {
  check_portion(p);
  uint64_t total = 0;
  for (const auto* m : targets) total += m->pixels();
  if (total == 0) throw validation_error("empty target set");

  std::vector<std::vector<float>> per_image(targets.size());
  parallel_for(targets.size(), workers,
               [&](size_t i) { per_image[i] = pixel_confidence(*targets[i]); });
  std::vector<float> pool;
  pool.reserve(total);
  for (auto& v : per_image) pool.insert(pool.end(), v.begin(), v.end());

  const uint64_t rank = selection_rank(p, total);
  const float ref = value_at_rank(pool, rank);
  return ThresholdSet::global(static_cast<double>(ref), total);
}

ThresholdSet determine_kc(const std::vector<const ProbMap*>& targets, double p,
                          unsigned workers) {
  check_portion(p);
  uint32_t classes = 0;
  for (const auto* m : targets) classes = std::max(classes, m->channels);

  struct ImagePools {
    std::vector<std::vector<float>> per_class;
  };
  std::vector<ImagePools> collected(targets.size());
  parallel_for(targets.size(), workers, [&](size_t i) {
    const ProbMap& m = *targets[i];
    auto& pools = collected[i].per_class;
    pools.resize(classes);
    const size_t plane = m.pixels();
    for (size_t px = 0; px < plane; ++px) {
      uint32_t arg = 0;
      float best = m.data[px];
      for (uint32_t c = 1; c < m.channels; ++c) {
        const float v = m.data[static_cast<size_t>(c) * plane + px];
        if (v > best) {
          best = v;
          arg = c;
        }
      }
      pools[arg].push_back(best);
    }
  });

  ThresholdSet t;
  t.kind = ThresholdSet::Kind::kPerClass;
  t.ref_conf.assign(classes, std::numeric_limits<double>::quiet_NaN());
  t.active.assign(classes, 0);
  t.pool_size.assign(classes, 0);
  for (uint32_t c = 0; c < classes; ++c) {
    std::vector<float> pool;
    for (const auto& img : collected)
      pool.insert(pool.end(), img.per_class[c].begin(), img.per_class[c].end());
    t.pool_size[c] = pool.size();
    if (pool.empty()) continue;
    const uint64_t rank = selection_rank(p, pool.size());
    t.ref_conf[c] = static_cast<double>(value_at_rank(pool, rank));
    t.active[c] = 1;
  }
  return t;
}

ThresholdSet determine_k(const std::vector<ProbMap>& targets, double p,
                         unsigned workers) {
  return determine_k(as_pointers(targets), p, workers);
}

ThresholdSet determine_kc(const std::vector<ProbMap>& targets, double p,
                          unsigned workers) {
  return determine_kc(as_pointers(targets), p, workers);
}

void write_thresholds_csv(const ThresholdSet& t,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out << "class,ref_conf,k,active,pixel_count\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (t.kind == ThresholdSet::Kind::kGlobal) {
    out << "GLOBAL," << num(t.ref_conf[0]) << ',' << num(t.k(0)) << ",1,"
        << t.pool_size[0] << '\n';
  } else {
    for (uint32_t c = 0; c < t.classes(); ++c) {
      if (t.is_active(c))
        out << c << ',' << num(t.ref_conf[c]) << ',' << num(t.k(c)) << ",1,"
            << t.pool_size[c] << '\n';
      else
        out << c << ",nan,nan,0," << t.pool_size[c] << '\n';
    }
  }
  if (!out) throw io_error("short write to " + path.string());
}

ThresholdSet read_thresholds_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "class,ref_conf,k,active,pixel_count")
    throw validation_error("unexpected thresholds header in " + path.string());

  ThresholdSet t;
  t.kind = ThresholdSet::Kind::kPerClass;
  bool global = false;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    fields.clear();
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5)
      throw validation_error("malformed thresholds row in " + path.string());
    if (fields[0] == "GLOBAL") global = true;
    t.ref_conf.push_back(std::strtod(fields[1].c_str(), nullptr));
    t.active.push_back(fields[3] == "1" ? 1 : 0);
    t.pool_size.push_back(std::strtoull(fields[4].c_str(), nullptr, 10));
  }
  if (t.ref_conf.empty())
    throw validation_error("thresholds file has no rows: " + path.string());
  if (global) {
    if (t.ref_conf.size() != 1)
      throw validation_error("GLOBAL row must be the only row in " +
                             path.string());
    t.kind = ThresholdSet::Kind::kGlobal;
  }
  return t;
}

}  // namespace selftrain
