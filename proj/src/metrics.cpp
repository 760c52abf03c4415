#include "nlfctn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nlfctn {

namespace {

void check_pair(const DenseTensor& x, const DenseTensor& ref) {
  require_same_shape(x, ref, "metrics");
  if (x.order() < 2) throw std::invalid_argument("metrics need at least two spatial modes");
}

std::size_t band_count(const DenseTensor& x) { return x.size() / (x.dim(0) * x.dim(1)); }

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - c;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable "valid" filtering of one rows x cols plane (column-major).
std::vector<double> filter_valid(const double* src, std::size_t rows, std::size_t cols, const std::vector<double>& w) {
  const std::size_t n = w.size();
  const std::size_t out_rows = rows - n + 1;
  const std::size_t out_cols = cols - n + 1;
  std::vector<double> tmp(out_rows * cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < out_rows; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += w[k] * src[c * rows + r + k];
      tmp[c * out_rows + r] = s;
    }
  std::vector<double> out(out_rows * out_cols);
  for (std::size_t c = 0; c < out_cols; ++c)
    for (std::size_t r = 0; r < out_rows; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += w[k] * tmp[(c + k) * out_rows + r];
      out[c * out_rows + r] = s;
    }
  return out;
}

}  // namespace

double psnr(const DenseTensor& x, const DenseTensor& ref, std::vector<double>* per_band) {
  check_pair(x, ref);
  const std::size_t plane = x.dim(0) * x.dim(1);
  const std::size_t bands = band_count(x);
  double total = 0.0;
  if (per_band) per_band->clear();
  for (std::size_t b = 0; b < bands; ++b) {
    double sq = 0.0;
    for (std::size_t k = b * plane; k < (b + 1) * plane; ++k) {
      const double d = x[k] - ref[k];
      sq += d * d;
    }
    const double mse = sq / static_cast<double>(plane);
    const double value = mse > 0.0 ? 10.0 * std::log10(1.0 / mse) : std::numeric_limits<double>::infinity();
    if (per_band) per_band->push_back(value);
    total += value;
  }
  return total / static_cast<double>(bands);
}

double ssim(const DenseTensor& x, const DenseTensor& ref, const SsimOptions& opt, std::vector<double>* per_band) {
  check_pair(x, ref);
  const std::size_t rows = x.dim(0);
  const std::size_t cols = x.dim(1);
  const auto win = static_cast<std::size_t>(opt.window);
  if (opt.window < 1 || rows < win || cols < win)
    throw std::invalid_argument("SSIM window of " + std::to_string(opt.window) + " exceeds the spatial extent");
  const double c1 = (opt.k1 * opt.dynamic_range) * (opt.k1 * opt.dynamic_range);
  const double c2 = (opt.k2 * opt.dynamic_range) * (opt.k2 * opt.dynamic_range);
  const auto w = gaussian_window(opt.window, opt.sigma);

  const std::size_t plane = rows * cols;
  const std::size_t bands = band_count(x);
  std::vector<double> xx(plane), yy(plane), xy(plane);
  double total = 0.0;
  if (per_band) per_band->clear();
  for (std::size_t b = 0; b < bands; ++b) {
    const double* px = x.data().data() + b * plane;
    const double* py = ref.data().data() + b * plane;
    for (std::size_t k = 0; k < plane; ++k) {
      xx[k] = px[k] * px[k];
      yy[k] = py[k] * py[k];
      xy[k] = px[k] * py[k];
    }
    const auto mu_x = filter_valid(px, rows, cols, w);
    const auto mu_y = filter_valid(py, rows, cols, w);
    const auto e_xx = filter_valid(xx.data(), rows, cols, w);
    const auto e_yy = filter_valid(yy.data(), rows, cols, w);
    const auto e_xy = filter_valid(xy.data(), rows, cols, w);
    double sum = 0.0;
    for (std::size_t k = 0; k < mu_x.size(); ++k) {
      const double mx = mu_x[k];
      const double my = mu_y[k];
      const double vx = e_xx[k] - mx * mx;
      const double vy = e_yy[k] - my * my;
      const double cov = e_xy[k] - mx * my;
      sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    const double value = sum / static_cast<double>(mu_x.size());
    if (per_band) per_band->push_back(value);
    total += value;
  }
  return total / static_cast<double>(bands);
}

double sam(const DenseTensor& x, const DenseTensor& ref) {
  check_pair(x, ref);
  const std::size_t plane = x.dim(0) * x.dim(1);
  const std::size_t spectral = x.order() > 2 ? x.dim(2) : 1;
  const std::size_t outer = x.size() / (plane * spectral);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t p = 0; p < plane; ++p) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t s = 0; s < spectral; ++s) {
        const std::size_t k = p + plane * (s + spectral * o);
        dot += x[k] * ref[k];
        na += x[k] * x[k];
        nb += ref[k] * ref[k];
      }
      if (na == 0.0 || nb == 0.0) continue;
      const double cosine = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
      total += std::acos(cosine) * 180.0 / std::numbers::pi;
      ++counted;
    }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

MetricsReport evaluate(const DenseTensor& x, const DenseTensor& ref, const SsimOptions& opt) {
  MetricsReport r;
  r.psnr = psnr(x, ref, &r.psnr_per_band);
  r.ssim = ssim(x, ref, opt, &r.ssim_per_band);
  r.sam = sam(x, ref);
  return r;
}

}  // namespace nlfctn
