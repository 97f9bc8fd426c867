#include "selftrain/spatial_prior.hpp"

#include <cmath>

#include "selftrain/parallel.hpp"

namespace selftrain {

Tensor3f accumulate_frequencies(const std::vector<const LabelMap*>& labels,
                                uint32_t classes) {
  if (labels.empty()) throw validation_error("no label maps to accumulate");
  const uint32_t h = labels[0]->height, w = labels[0]->width;
  for (const auto* m : labels)
    if (m->height != h || m->width != w)
      throw validation_error("label maps disagree in spatial extent");

  Tensor3f counts(classes, h, w, 0.0f);
  const size_t plane = counts.pixels();
  for (const auto* m : labels) {
    for (size_t px = 0; px < plane; ++px) {
      const uint8_t v = m->values[px];
      if (v == kIgnoreLabel) continue;
      if (v >= classes)
        throw validation_error("label value exceeds class count");
      counts.data[static_cast<size_t>(v) * plane + px] += 1.0f;
    }
  }
  return counts;
}

Tensor3f accumulate_frequencies(const std::vector<LabelMap>& labels,
                                uint32_t classes) {
  std::vector<const LabelMap*> ptrs;
  ptrs.reserve(labels.size());
  for (const auto& m : labels) ptrs.push_back(&m);
  return accumulate_frequencies(ptrs, classes);
}

namespace {

std::vector<double> gaussian_kernel(uint32_t size, double sigma) {
  const int half = static_cast<int>(size) / 2;
  std::vector<double> k(size);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) /
                              (2.0 * sigma * sigma));
    k[static_cast<size_t>(i + half)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

// One 1-D pass with per-position renormalization over in-bounds taps.
// stride selects rows vs columns.
void smooth_axis(const float* src, float* dst, size_t lines, size_t len,
                 size_t line_stride, size_t stride,
                 const std::vector<double>& kernel) {
  const int half = static_cast<int>(kernel.size()) / 2;
  for (size_t line = 0; line < lines; ++line) {
    const float* in = src + line * line_stride;
    float* out = dst + line * line_stride;
    for (size_t i = 0; i < len; ++i) {
      double acc = 0.0, weight = 0.0;
      const int lo = std::max<int>(-half, -static_cast<int>(i));
      const int hi = std::min<int>(half, static_cast<int>(len - 1 - i));
      for (int o = lo; o <= hi; ++o) {
        const double w = kernel[static_cast<size_t>(o + half)];
        acc += w * in[static_cast<size_t>(static_cast<int>(i) + o) * stride];
        weight += w;
      }
      out[i * stride] = static_cast<float>(acc / weight);
    }
  }
}

}  // namespace

Tensor3f gaussian_smooth(const Tensor3f& counts, uint32_t kernel_size,
                         double sigma, unsigned workers) {
  if (kernel_size % 2 == 0)
    throw validation_error("kernel size must be odd");
  if (!(sigma > 0.0)) throw validation_error("sigma must be positive");
  if (kernel_size > counts.height || kernel_size > counts.width)
    throw validation_error("kernel larger than image");

  const auto kernel = gaussian_kernel(kernel_size, sigma);
  const size_t h = counts.height, w = counts.width, plane = counts.pixels();
  Tensor3f out(counts.channels, counts.height, counts.width);
  parallel_for(counts.channels, workers, [&](size_t c) {
    std::vector<float> tmp(plane);
    const float* src = counts.data.data() + c * plane;
    float* dst = out.data.data() + c * plane;
    // rows: each image row is a contiguous line
    smooth_axis(src, tmp.data(), h, w, w, 1, kernel);
    // columns: lines advance by one element, taps stride by the row width
    smooth_axis(tmp.data(), dst, w, h, 1, w, kernel);
  });
  return out;
}

SpatialPrior normalize_prior(const Tensor3f& smoothed) {
  SpatialPrior prior;
  prior.q = smoothed;
  prior.present.assign(smoothed.channels, 0);
  const size_t plane = smoothed.pixels();
  bool any = false;
  for (uint32_t c = 0; c < smoothed.channels; ++c) {
    double total = 0.0;
    for (size_t px = 0; px < plane; ++px)
      total += smoothed.data[static_cast<size_t>(c) * plane + px];
    if (total <= 0.0) continue;
    any = true;
    prior.present[c] = 1;
    for (size_t px = 0; px < plane; ++px) {
      auto& v = prior.q.data[static_cast<size_t>(c) * plane + px];
      v = static_cast<float>(static_cast<double>(v) / total);
    }
  }
  if (!any) throw validation_error("all class planes are zero");
  return prior;
}

SpatialPrior build_spatial_prior(const std::vector<const LabelMap*>& labels,
                                 uint32_t classes, uint32_t kernel_size,
                                 double sigma, unsigned workers) {
  if (sigma <= 0.0) sigma = static_cast<double>(kernel_size) / 6.0;
  const Tensor3f counts = accumulate_frequencies(labels, classes);
  SpatialPrior prior =
      normalize_prior(gaussian_smooth(counts, kernel_size, sigma, workers));
  prior.kernel_size = kernel_size;
  prior.sigma = sigma;
  return prior;
}

SpatialPrior resample_prior(const SpatialPrior& prior, uint32_t height,
                            uint32_t width) {
  const Tensor3f& q = prior.q;
  if (height == q.height && width == q.width) return prior;
  Tensor3f out(q.channels, height, width);
  const size_t src_plane = q.pixels(), dst_plane = out.pixels();
  for (uint32_t c = 0; c < q.channels; ++c) {
    for (uint32_t r = 0; r < height; ++r) {
      const double sy = height > 1
                            ? static_cast<double>(r) * (q.height - 1) /
                                  (height - 1)
                            : 0.0;
      const uint32_t y0 = static_cast<uint32_t>(sy);
      const uint32_t y1 = std::min(y0 + 1, q.height - 1);
      const double fy = sy - y0;
      for (uint32_t col = 0; col < width; ++col) {
        const double sx = width > 1
                              ? static_cast<double>(col) * (q.width - 1) /
                                    (width - 1)
                              : 0.0;
        const uint32_t x0 = static_cast<uint32_t>(sx);
        const uint32_t x1 = std::min(x0 + 1, q.width - 1);
        const double fx = sx - x0;
        const auto v = [&](uint32_t rr, uint32_t cc) {
          return static_cast<double>(
              q.data[static_cast<size_t>(c) * src_plane + rr * q.width + cc]);
        };
        const double interp = (1 - fy) * ((1 - fx) * v(y0, x0) + fx * v(y0, x1)) +
                              fy * ((1 - fx) * v(y1, x0) + fx * v(y1, x1));
        out.data[static_cast<size_t>(c) * dst_plane + r * width + col] =
            static_cast<float>(interp);
      }
    }
  }
  SpatialPrior res = normalize_prior(out);
  res.kernel_size = prior.kernel_size;
  res.sigma = prior.sigma;
  return res;
}

}  // namespace selftrain
