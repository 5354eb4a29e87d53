#pragma once

#include "fpd/video_io.hpp"

namespace fpd {

// Windowed SSIM with a uniform (box) window. C1 = (k1 * data_range)^2,
// C2 = (k2 * data_range)^2. sample_covariance selects N-1 normalization for
// the window variances/covariance (N = window_size^2). Gaussian weighting is
// out of scope and rejected.
struct SsimConfig {
    int window_size = 7;
    double k1 = 0.01;
    double k2 = 0.03;
    double data_range = 1.0;
    bool sample_covariance = true;
    bool gaussian_weighted = false;
};

// Mean SSIM between two single-channel frames of equal size. The SSIM map is
// evaluated at every pixel whose full window fits and averaged after cropping
// a border of (window_size - 1) / 2, accumulating row-major in double
// precision. Runs on integral images; result is in [-1, 1].
double ssim(const Frame& a, const Frame& b, const SsimConfig& cfg = {});

} // namespace fpd
