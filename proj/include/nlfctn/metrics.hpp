#pragma once

#include <vector>

#include "nlfctn/tensor.hpp"

namespace nlfctn {

// Images are laid out as (I_1, I_2, ...): modes 0 and 1 are spatial, every
// combination of the remaining indices is one band. The spectral fibers used
// by SAM run along mode 2.

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

struct MetricsReport {
  double psnr = 0.0;  ///< dB; +inf when the images are identical
  double ssim = 0.0;
  double sam = 0.0;   ///< degrees
  std::vector<double> psnr_per_band;
  std::vector<double> ssim_per_band;
};

/// Mean over bands of 10 log10(1 / MSE_band), peak value 1.
double psnr(const DenseTensor& x, const DenseTensor& ref, std::vector<double>* per_band = nullptr);

/// Mean over bands of the mean SSIM map, Gaussian window, "valid" region only.
double ssim(const DenseTensor& x, const DenseTensor& ref, const SsimOptions& opt = {},
            std::vector<double>* per_band = nullptr);

/// Mean spectral angle in degrees; fibers with zero norm in either image are skipped.
double sam(const DenseTensor& x, const DenseTensor& ref);

MetricsReport evaluate(const DenseTensor& x, const DenseTensor& ref, const SsimOptions& opt = {});

}  // namespace nlfctn
