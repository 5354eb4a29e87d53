#include "fpd/ssim.hpp"

#include "fpd/error.hpp"

#include <string>
#include <vector>

namespace fpd {

namespace {

// sat has (h+1) x (w+1) entries; sat[y][x] = sum of src over [0,y) x [0,x).
void integral_image(const std::vector<double>& src, int w, int h, std::vector<double>& sat) {
    sat.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * w;
        double* out = sat.data() + static_cast<std::size_t>(y + 1) * (w + 1);
        const double* prev = sat.data() + static_cast<std::size_t>(y) * (w + 1);
        double run = 0.0;
        for (int x = 0; x < w; ++x) {
            run += row[x];
            out[x + 1] = prev[x + 1] + run;
        }
    }
}

inline double window_sum(const std::vector<double>& sat, int w, int x0, int y0, int x1, int y1) {
    const std::size_t stride = static_cast<std::size_t>(w + 1);
    return sat[static_cast<std::size_t>(y1) * stride + x1] -
           sat[static_cast<std::size_t>(y0) * stride + x1] -
           sat[static_cast<std::size_t>(y1) * stride + x0] +
           sat[static_cast<std::size_t>(y0) * stride + x0];
}

} // namespace

double ssim(const Frame& a, const Frame& b, const SsimConfig& cfg) {
    if (cfg.gaussian_weighted)
        throw ConfigError("ssim: gaussian windows are not supported");
    if (cfg.window_size < 3 || cfg.window_size % 2 == 0)
        throw ConfigError("ssim: window_size must be odd and >= 3");
    if (!(cfg.k1 > 0.0) || !(cfg.k2 > 0.0) || !(cfg.data_range > 0.0))
        throw ConfigError("ssim: k1, k2, data_range must be positive");
    if (a.channels != 1 || b.channels != 1)
        throw FormatError("ssim: frames must be single-channel");
    if (a.width != b.width || a.height != b.height)
        throw FormatError("ssim: dimension mismatch");
    if (a.width < cfg.window_size || a.height < cfg.window_size)
        throw FormatError("ssim: frame smaller than window (" +
                          std::to_string(cfg.window_size) + ")");

    const int w = a.width;
    const int h = a.height;
    const std::size_t n_px = static_cast<std::size_t>(w) * h;
    std::vector<double> xa(n_px), xb(n_px), xaa(n_px), xbb(n_px), xab(n_px);
    for (std::size_t i = 0; i < n_px; ++i) {
        const double va = a.pixels[i];
        const double vb = b.pixels[i];
        xa[i] = va;
        xb[i] = vb;
        xaa[i] = va * va;
        xbb[i] = vb * vb;
        xab[i] = va * vb;
    }
    std::vector<double> sa, sb, saa, sbb, sab;
    integral_image(xa, w, h, sa);
    integral_image(xb, w, h, sb);
    integral_image(xaa, w, h, saa);
    integral_image(xbb, w, h, sbb);
    integral_image(xab, w, h, sab);

    const int win = cfg.window_size;
    const double n = static_cast<double>(win) * win;
    const double norm = cfg.sample_covariance ? n - 1.0 : n;
    const double c1 = (cfg.k1 * cfg.data_range) * (cfg.k1 * cfg.data_range);
    const double c2 = (cfg.k2 * cfg.data_range) * (cfg.k2 * cfg.data_range);

    double total = 0.0;
    std::int64_t count = 0;
    for (int y = 0; y + win <= h; ++y) {
        for (int x = 0; x + win <= w; ++x) {
            const double sum_a = window_sum(sa, w, x, y, x + win, y + win);
            const double sum_b = window_sum(sb, w, x, y, x + win, y + win);
            const double sum_aa = window_sum(saa, w, x, y, x + win, y + win);
            const double sum_bb = window_sum(sbb, w, x, y, x + win, y + win);
            const double sum_ab = window_sum(sab, w, x, y, x + win, y + win);
            const double mu_a = sum_a / n;
            const double mu_b = sum_b / n;
            // (x*y)/n forms keep ssim(a,b) and ssim(b,a) bit-identical.
            const double var_a = (sum_aa - (sum_a * sum_a) / n) / norm;
            const double var_b = (sum_bb - (sum_b * sum_b) / n) / norm;
            const double cov = (sum_ab - (sum_a * sum_b) / n) / norm;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

} // namespace fpd
