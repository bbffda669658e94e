#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "vtrack/image.hpp"

namespace vtrack {

/// Complex 2D spectrum, row-major, unnormalized forward transform.
struct Spectrum {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> data;

    Spectrum() = default;
    Spectrum(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h) {}

    std::complex<double>& at(int x, int y) {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    const std::complex<double>& at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
};

namespace detail {
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Signed DFT frequency in cycles per pixel for bin k of an n-point grid.
inline double dft_frequency(int k, int n) {
    return (k <= n / 2 ? k : k - n) / static_cast<double>(n);
}

inline Spectrum fft2(const GrayImage& img) {
    Spectrum in(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) in.data[i] = img.data[i];
    Spectrum out(img.width, img.height);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_dft_2d(
            img.height, img.width,
            reinterpret_cast<fftw_complex*>(in.data.data()),
            reinterpret_cast<fftw_complex*>(out.data.data()),
            FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    return out;
}

/// Inverse transform (1/(W*H) normalized); returns the real part.
/// The imaginary residue is the caller's concern (it is negligible for
/// Hermitian-symmetric spectra).
inline GrayImage ifft2_real(const Spectrum& spec) {
    Spectrum in = spec;
    Spectrum out(spec.width, spec.height);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_dft_2d(
            spec.height, spec.width,
            reinterpret_cast<fftw_complex*>(in.data.data()),
            reinterpret_cast<fftw_complex*>(out.data.data()),
            FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    GrayImage img(spec.width, spec.height);
    const double norm = 1.0 / (static_cast<double>(spec.width) * spec.height);
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = out.data[i].real() * norm;
    return img;
}

} // namespace vtrack
