#pragma once

#include <cmath>

#include "vtrack/config.hpp"
#include "vtrack/fft.hpp"
#include "vtrack/image.hpp"

namespace vtrack {

/// Band-pass gain ||w||^u * exp(-w0 ||w||), zero at DC for u >= 1.
inline double cauchy_gain(double wx, double wy, const CauchyParams& params) {
    const double r = std::hypot(wx, wy);
    if (r == 0.0) return 0.0;
    return std::pow(r, params.u) * std::exp(-params.w0 * r);
}

struct MonogenicSignal {
    GrayImage even;
    GrayImage odd1;
    GrayImage odd2;
};

/// Band-passed even response plus the two Riesz (odd) responses.
/// Frequencies are in cycles/pixel; the Riesz multiplier at DC is 0
/// (removable, the Cauchy gain already nulls DC).
inline MonogenicSignal monogenic(const GrayImage& img, const CauchyParams& params) {
    if (img.width < 8 || img.height < 8)
        throw ImageTooSmall("monogenic requires dims >= 8x8");
    const Spectrum f = fft2(img);
    Spectrum even_s(f.width, f.height), odd1_s(f.width, f.height), odd2_s(f.width, f.height);
    for (int ky = 0; ky < f.height; ++ky) {
        const double wy = dft_frequency(ky, f.height);
        for (int kx = 0; kx < f.width; ++kx) {
            const double wx = dft_frequency(kx, f.width);
            const double r = std::hypot(wx, wy);
            const double c = cauchy_gain(wx, wy, params);
            const std::complex<double> bp = c * f.at(kx, ky);
            even_s.at(kx, ky) = bp;
            if (r > 0.0) {
                const std::complex<double> i_unit(0.0, 1.0);
                odd1_s.at(kx, ky) = i_unit * (wx / r) * bp;
                odd2_s.at(kx, ky) = i_unit * (wy / r) * bp;
            }
        }
    }
    return {ifft2_real(even_s), ifft2_real(odd1_s), ifft2_real(odd2_s)};
}

/// Feature asymmetry in [0,1]: per pixel, with odd = sqrt(o1^2 + o2^2),
/// FA = max(0, |odd| - |even| - T) / (sqrt(even^2 + odd^2) + eps).
/// T is either fixed or the geometric-mean (Rayleigh-style) noise floor
/// of the local energy.
inline GrayImage feature_asymmetry(const GrayImage& even, const GrayImage& odd1,
                                   const GrayImage& odd2, const FAParams& params) {
    if (!even.same_dims(odd1) || !even.same_dims(odd2))
        throw DimensionMismatch("monogenic component dims differ");
    const std::size_t n = even.size();
    std::vector<double> odd_mag(n), energy(n);
    for (std::size_t i = 0; i < n; ++i) {
        odd_mag[i] = std::hypot(odd1.data[i], odd2.data[i]);
        energy[i] = std::hypot(even.data[i], odd_mag[i]);
    }
    double t = params.fixed_t;
    if (params.threshold_mode == FaThresholdMode::rayleigh_estimate) {
        double log_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            log_sum += std::log(energy[i] + params.epsilon);
        t = std::exp(log_sum / static_cast<double>(n));
    }
    GrayImage fa(even.width, even.height);
    for (std::size_t i = 0; i < n; ++i) {
        const double num = odd_mag[i] - std::abs(even.data[i]) - t;
        const double v = std::max(0.0, num) / (energy[i] + params.epsilon);
        fa.data[i] = std::clamp(v, 0.0, 1.0);
    }
    return fa;
}

/// Convenience: band-pass + Riesz + FA in one call.
inline GrayImage feature_asymmetry_map(const GrayImage& img, const CauchyParams& cp,
                                       const FAParams& fp) {
    const MonogenicSignal m = monogenic(img, cp);
    return feature_asymmetry(m.even, m.odd1, m.odd2, fp);
}

} // namespace vtrack
