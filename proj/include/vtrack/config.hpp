#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "vtrack/errors.hpp"

namespace vtrack {

/// Isotropic band-pass gain ||w||^u * exp(-w0*||w||). Frequencies are
/// measured in cycles per pixel on the DFT grid, so the passband peak
/// sits at ||w|| = u/w0 (wavelength w0/u pixels for u=1).
struct CauchyParams {
    double w0 = 10.0;
    double u = 1.0;
};

enum class FaThresholdMode { fixed, rayleigh_estimate };

struct FAParams {
    FaThresholdMode threshold_mode = FaThresholdMode::rayleigh_estimate;
    double fixed_t = 0.0;      // used when threshold_mode == fixed
    double epsilon = 1e-6;     // stabilizer in the FA denominator
};

/// Level-set evolution constants. `mu` is the per-iteration weight of the
/// distance-regularization term (the timestep multiplies only the data
/// terms, as in the reference DRLSE implementation), so stability needs
/// mu < 0.25.
struct DrlseParams {
    double timestep = 10.0;
    double mu = 0.2;
    double lambda = 1.0;
    double alpha = -1.0;
    double epsilon = 1.0;
    int iterations = 15;
    int narrowband_halfwidth = 3;
    double c0 = 2.0;
    // Gaussian pre-smooth for the edge indicator. The width of the
    // low-g basin around an edge scales with this sigma, and the front
    // parks at the basin rim; 0.5 px keeps that standoff well under a
    // pixel on high-contrast walls while still suppressing pixel noise
    // (the bilateral filter has already denoised the input).
    double edge_sigma = 0.5;
};

struct EkfParams {
    Eigen::Matrix4d A1 = 1.5 * Eigen::Matrix4d::Identity();
    Eigen::Matrix4d A2 = -0.5 * Eigen::Matrix4d::Identity();
    Eigen::Matrix4d P0 = 1000.0 * Eigen::Matrix4d::Identity();
    Eigen::Matrix4d Q = 0.001 * Eigen::Matrix4d::Identity();
    Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
};

struct SequenceConfig {
    int downsample_factor = 4;
    int bilateral_kernel = 5;
    double bilateral_sigma_spatial = 0.0; // 0 -> kernel / 2.5
    double bilateral_sigma_range = 25.0;
    int cluster_kernel = 0; // 0 -> auto from vessel size after frame 0
    double cauchy_w0 = 10.0;
    double cauchy_u = 1.0;
    FaThresholdMode fa_threshold_mode = FaThresholdMode::rayleigh_estimate;
    double fa_fixed_t = 0.0;
    double fa_epsilon = 1e-6;
    double fa_min = 0.3; // radial-search acceptance threshold
    int radial_n = 360;
    int radial_m = 100;
    double shrink_factor = 0.75;
    DrlseParams drlse;
    EkfParams ekf;
    double pixel_pitch_mm = 0.0116;
    double small_vessel_diameter_px = 70.0;
    int threads = 0; // 0 -> all cores

    double sigma_spatial() const {
        return bilateral_sigma_spatial > 0.0 ? bilateral_sigma_spatial
                                             : bilateral_kernel / 2.5;
    }

    void validate() const {
        if (downsample_factor < 1) throw BadConfig("downsample_factor must be >= 1");
        if (bilateral_kernel < 3 || bilateral_kernel % 2 == 0)
            throw BadKernel("bilateral_kernel must be odd and >= 3");
        if (cluster_kernel != 0 && (cluster_kernel < 3 || cluster_kernel % 2 == 0))
            throw BadKernel("cluster_kernel must be odd and >= 3");
        if (radial_n < 8) throw BadConfig("radial_n must be >= 8");
        if (shrink_factor <= 0.0 || shrink_factor >= 1.0)
            throw BadConfig("shrink_factor must be in (0,1)");
        if (pixel_pitch_mm <= 0.0) throw BadConfig("pixel_pitch_mm must be > 0");
        if (drlse.mu >= 0.25 || drlse.mu <= 0.0)
            throw BadConfig("drlse mu must be in (0, 0.25)");
        if (drlse.iterations < 1) throw BadConfig("drlse iterations must be >= 1");
        if (drlse.epsilon <= 0.0) throw BadConfig("drlse epsilon must be > 0");
    }
};

/// UHFUS acquisition preset: 11.6 um pixel pitch, 832x512 B-scans,
/// downsampled x4, 5x5 bilateral, w0=10, dt=10.
inline SequenceConfig uhfus_preset() { return SequenceConfig{}; }

/// HFUS acquisition preset: 92.5 um pitch, 280x534 B-scans, 3x3
/// bilateral, w0=5, dt=8. A mild 2x downsample keeps enough speckle
/// averaging for the phase map while staying well inside the sub-pixel
/// accuracy budget at this coarser pitch.
inline SequenceConfig hfus_preset() {
    SequenceConfig cfg;
    cfg.pixel_pitch_mm = 0.0925;
    cfg.downsample_factor = 2;
    cfg.bilateral_kernel = 3;
    cfg.cauchy_w0 = 5.0;
    cfg.drlse.timestep = 8.0;
    // Less speckle averaging than the 4x path; accept weaker asymmetry
    // peaks so thin wall responses are not discarded.
    cfg.fa_min = 0.2;
    return cfg;
}

inline SequenceConfig preset_by_name(const std::string& name) {
    if (name == "uhfus") return uhfus_preset();
    if (name == "hfus") return hfus_preset();
    if (name == "custom") return SequenceConfig{};
    throw BadConfig("unknown preset: " + name);
}

/// Flat key=value config file. '#' starts a comment; blank lines ignored.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

inline void apply_config_overrides(SequenceConfig& cfg,
                                   const std::map<std::string, std::string>& kv) {
    auto as_int = [](const std::string& s) { return std::stoi(s); };
    auto as_double = [](const std::string& s) { return std::stod(s); };
    for (const auto& [key, val] : kv) {
        if (key == "downsample_factor") cfg.downsample_factor = as_int(val);
        else if (key == "bilateral_kernel") cfg.bilateral_kernel = as_int(val);
        else if (key == "bilateral_sigma_spatial") cfg.bilateral_sigma_spatial = as_double(val);
        else if (key == "bilateral_sigma_range") cfg.bilateral_sigma_range = as_double(val);
        else if (key == "cluster_kernel") cfg.cluster_kernel = as_int(val);
        else if (key == "cauchy_w0") cfg.cauchy_w0 = as_double(val);
        else if (key == "cauchy_u") cfg.cauchy_u = as_double(val);
        else if (key == "fa_threshold_mode") {
            if (val == "fixed") cfg.fa_threshold_mode = FaThresholdMode::fixed;
            else if (val == "rayleigh_estimate") cfg.fa_threshold_mode = FaThresholdMode::rayleigh_estimate;
            else throw BadConfig("fa_threshold_mode must be fixed|rayleigh_estimate");
        }
        else if (key == "fa_fixed_t") cfg.fa_fixed_t = as_double(val);
        else if (key == "fa_epsilon") cfg.fa_epsilon = as_double(val);
        else if (key == "fa_min") cfg.fa_min = as_double(val);
        else if (key == "radial_n") cfg.radial_n = as_int(val);
        else if (key == "radial_m") cfg.radial_m = as_int(val);
        else if (key == "shrink_factor") cfg.shrink_factor = as_double(val);
        else if (key == "drlse_timestep") cfg.drlse.timestep = as_double(val);
        else if (key == "drlse_mu") cfg.drlse.mu = as_double(val);
        else if (key == "drlse_lambda") cfg.drlse.lambda = as_double(val);
        else if (key == "drlse_alpha") cfg.drlse.alpha = as_double(val);
        else if (key == "drlse_epsilon") cfg.drlse.epsilon = as_double(val);
        else if (key == "drlse_iterations") cfg.drlse.iterations = as_int(val);
        else if (key == "drlse_narrowband_halfwidth") cfg.drlse.narrowband_halfwidth = as_int(val);
        else if (key == "drlse_c0") cfg.drlse.c0 = as_double(val);
        else if (key == "drlse_edge_sigma") cfg.drlse.edge_sigma = as_double(val);
        else if (key == "ekf_r") cfg.ekf.R = as_double(val) * Eigen::Matrix4d::Identity();
        else if (key == "pixel_pitch_mm") cfg.pixel_pitch_mm = as_double(val);
        else if (key == "small_vessel_diameter_px") cfg.small_vessel_diameter_px = as_double(val);
        else if (key == "threads") cfg.threads = as_int(val);
        else throw BadConfig("unknown config key: " + key);
    }
}

} // namespace vtrack
