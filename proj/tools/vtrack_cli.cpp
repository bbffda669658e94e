// vtrack command-line interface.
//
// Subcommands:
//   run      segment and track a vessel through an image sequence
//   score    compare two contour files (Dice, Hausdorff, MAD, DFPD/DFND)
//   phantom  generate a synthetic speckle sequence with ground truth
//   bench    timing report for the per-frame pipeline
//
// Exit codes: 0 success, 1 usage error, 2 processing error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vtrack/io.hpp"
#include "vtrack/metrics.hpp"
#include "vtrack/phantom.hpp"
#include "vtrack/pipeline.hpp"

namespace fs = std::filesystem;
using namespace vtrack;

namespace {

struct SeedArg {
    double x = -1.0, y = -1.0;
    bool set = false;
};

bool parse_seed(const std::string& text, SeedArg& out) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return false;
    try {
        out.x = std::stod(text.substr(0, comma));
        out.y = std::stod(text.substr(comma + 1));
    } catch (...) {
        return false;
    }
    out.set = true;
    return true;
}

SequenceConfig build_config(const std::string& preset, const std::string& config_path,
                            int threads) {
    SequenceConfig cfg = preset_by_name(preset);
    if (!config_path.empty()) apply_config_overrides(cfg, parse_config_file(config_path));
    if (threads >= 0) cfg.threads = threads;
    return cfg;
}

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04d.pgm", index);
    return buf;
}

// Rasterization canvas large enough for every vertex in both files.
std::pair<int, int> canvas_dims(const std::vector<ContourResult>& a,
                                const std::vector<ContourResult>& b) {
    double mx = 1.0, my = 1.0;
    for (const auto* v : {&a, &b})
        for (const auto& r : *v)
            for (const auto& p : r.points) {
                mx = std::max(mx, p.x);
                my = std::max(my, p.y);
            }
    return {static_cast<int>(std::ceil(mx)) + 2, static_cast<int>(std::ceil(my)) + 2};
}

int cmd_run(const std::string& input_dir, const std::string& output_dir, SeedArg seed,
            const std::string& preset, const std::string& config_path, int threads,
            bool overlays, const std::string& truth_path) {
    const SequenceConfig cfg = build_config(preset, config_path, threads);
    const auto frames = load_sequence(input_dir);
    fs::create_directories(output_dir);
    RunStats stats;
    const auto results = run_sequence(frames, {seed.x, seed.y}, cfg, &stats);
    write_contours(results, (fs::path(output_dir) / "contours.txt").string());

    std::vector<ContourResult> truth;
    if (!truth_path.empty()) truth = read_contours(truth_path);

    if (overlays) {
        const fs::path dir = fs::path(output_dir) / "overlays";
        fs::create_directories(dir);
        for (std::size_t t = 0; t < results.size(); ++t) {
            const std::vector<Point>* ref =
                t < truth.size() ? &truth[t].points : nullptr;
            const RgbImage img = render_overlay(frames[t], results[t], ref);
            char name[32];
            std::snprintf(name, sizeof name, "frame_%04zu.png", t);
            save_png_rgb(img, (dir / name).string());
        }
    }

    const double total_ms =
        std::accumulate(stats.frame_ms.begin(), stats.frame_ms.end(), 0.0);
    std::printf("frames: %zu\n", results.size());
    std::printf("total pipeline time: %.1f ms (%.2f ms/frame)\n", total_ms,
                total_ms / static_cast<double>(results.size()));

    if (!truth.empty()) {
        if (truth.size() != results.size())
            throw BadConfig("truth file frame count differs from sequence");
        const auto [w, h] = canvas_dims(results, truth);
        double dice_sum = 0.0, h_sum = 0.0, mad_sum = 0.0;
        for (std::size_t t = 0; t < results.size(); ++t) {
            const auto ms = rasterize(results[t].points, w, h);
            const auto mg = rasterize(truth[t].points, w, h);
            dice_sum += dice(ms, mg);
            h_sum += hausdorff_mm(results[t].points, truth[t].points, cfg.pixel_pitch_mm);
            mad_sum += mad_mm(results[t].points, truth[t].points, cfg.pixel_pitch_mm);
        }
        const double n = static_cast<double>(results.size());
        std::printf("mean dice: %.4f\n", dice_sum / n);
        std::printf("mean hausdorff: %.4f mm\n", h_sum / n);
        std::printf("mean mad: %.4f mm\n", mad_sum / n);
    }
    return 0;
}

int cmd_score(const std::string& file_a, const std::string& file_b, double pitch_mm) {
    const auto a = read_contours(file_a);
    const auto b = read_contours(file_b);
    if (a.size() != b.size())
        throw BadConfig("contour files have different frame counts");
    if (a.empty()) throw BadConfig("contour files are empty");
    const auto [w, h] = canvas_dims(a, b);
    double dice_sum = 0.0, h_sum = 0.0, mad_sum = 0.0, dfpd_sum = 0.0, dfnd_sum = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const auto ma = rasterize(a[t].points, w, h);
        const auto mb = rasterize(b[t].points, w, h);
        dice_sum += dice(ma, mb);
        h_sum += hausdorff_mm(a[t].points, b[t].points, pitch_mm);
        mad_sum += mad_mm(a[t].points, b[t].points, pitch_mm);
        const auto [dfpd, dfnd] = dfpd_dfnd(ma, mb);
        dfpd_sum += dfpd;
        dfnd_sum += dfnd;
    }
    const double n = static_cast<double>(a.size());
    std::printf("frames: %zu\n", a.size());
    std::printf("mean dice: %.4f\n", dice_sum / n);
    std::printf("mean hausdorff: %.4f mm\n", h_sum / n);
    std::printf("mean mad: %.4f mm\n", mad_sum / n);
    std::printf("mean dfpd: %.4f\n", dfpd_sum / n);
    std::printf("mean dfnd: %.4f\n", dfnd_sum / n);
    return 0;
}

int cmd_phantom(const std::string& output_dir, int width, int height, int frames,
                const std::string& motion, double drift_vx, double drift_vy,
                double compression_amplitude, double compression_period,
                int jump_frame, double jump_x, double jump_y, double diameter,
                bool no_speckle, uint64_t rng_seed) {
    PhantomSpec spec;
    spec.width = width;
    spec.height = height;
    spec.frames = frames;
    spec.vessel.a = spec.vessel.b = diameter / 2.0;
    spec.vessel.cx = std::min(200.0, width / 2.0);
    spec.vessel.cy = height / 2.0;
    spec.rng_seed = rng_seed;
    if (no_speckle) spec.speckle = SpeckleMode::none;
    if (motion == "still") spec.motion = MotionMode::still;
    else if (motion == "drift") spec.motion = MotionMode::longitudinal_drift;
    else if (motion == "compression") spec.motion = MotionMode::compression;
    else if (motion == "jump") spec.motion = MotionMode::jump;
    else throw BadConfig("motion must be still|drift|compression|jump");
    spec.drift_vx = drift_vx;
    spec.drift_vy = drift_vy;
    spec.compression_amplitude = compression_amplitude;
    spec.compression_period = compression_period;
    spec.jump_frame = jump_frame;
    spec.jump_offset = {jump_x, jump_y};

    const PhantomResult out = generate(spec);
    fs::create_directories(output_dir);
    for (int t = 0; t < frames; ++t)
        save_pgm(out.frames[t], (fs::path(output_dir) / frame_name(t)).string());
    write_contours(out.truth, (fs::path(output_dir) / "truth.txt").string());
    std::printf("wrote %d frames + truth.txt to %s\n", frames, output_dir.c_str());
    std::printf("seed point: %.1f,%.1f\n", spec.vessel.cx, spec.vessel.cy);
    return 0;
}

int cmd_bench(int frames, const std::string& preset, const std::string& config_path,
              int threads) {
    PhantomSpec spec;
    spec.frames = frames;
    spec.motion = MotionMode::longitudinal_drift;
    spec.drift_vx = 2.0;
    const PhantomResult data = generate(spec);
    const SequenceConfig cfg = build_config(preset, config_path, threads);
    RunStats stats;
    run_sequence(data.frames, {spec.vessel.cx, spec.vessel.cy}, cfg, &stats);
    std::vector<double> ms = stats.frame_ms;
    std::sort(ms.begin(), ms.end());
    const double mean = std::accumulate(ms.begin(), ms.end(), 0.0) /
                        static_cast<double>(ms.size());
    const double p95 = ms[std::min(ms.size() - 1,
                                   static_cast<std::size_t>(ms.size() * 0.95))];
    std::printf("frames: %zu (%dx%d input)\n", ms.size(), spec.width, spec.height);
    std::printf("threads: %d\n", cfg.threads);
    std::printf("mean: %.2f ms/frame\n", mean);
    std::printf("p95:  %.2f ms/frame\n", p95);
    std::printf("fps:  %.1f\n", 1000.0 / mean);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "vtrack: vessel contour segmentation and tracking for B-scan sequences\n"
        "Exit codes: 0 success, 1 usage error, 2 processing error."};
    app.require_subcommand(1);

    // --- run
    auto* run = app.add_subcommand("run", "segment and track a sequence");
    std::string run_input, run_output = "out", run_preset = "uhfus";
    std::string run_config, run_truth, run_seed_text;
    int run_threads = -1;
    bool run_overlays = false;
    run->add_option("input", run_input, "directory of .pgm/.png frames")->required();
    run->add_option("--seed", run_seed_text, "seed point X,Y inside the lumen (frame 0)")
        ->required();
    run->add_option("--output", run_output, "output directory");
    run->add_option("--preset", run_preset, "uhfus|hfus|custom");
    run->add_option("--config", run_config, "key=value config override file");
    run->add_option("--threads", run_threads, "worker threads (0 = all cores)");
    run->add_option("--truth", run_truth, "ground-truth contour file for metrics");
    run->add_flag("--overlays", run_overlays, "write per-frame overlay PNGs");

    // --- score
    auto* score = app.add_subcommand("score", "compare two contour files");
    std::string score_a, score_b;
    double score_pitch = 0.0116;
    score->add_option("reference", score_a, "reference contour file")->required();
    score->add_option("candidate", score_b, "candidate contour file")->required();
    score->add_option("--pitch", score_pitch, "pixel pitch in mm");

    // --- phantom
    auto* phantom = app.add_subcommand("phantom", "generate a synthetic sequence");
    std::string ph_output = "phantom", ph_motion = "drift";
    int ph_width = 832, ph_height = 512, ph_frames = 100, ph_jump_frame = 50;
    double ph_vx = 2.0, ph_vy = 0.0, ph_comp_amp = 0.1, ph_comp_period = 50.0;
    double ph_jump_x = 40.0, ph_jump_y = 0.0, ph_diameter = 70.0;
    bool ph_no_speckle = false;
    uint64_t ph_rng = 1234;
    phantom->add_option("output", ph_output, "output directory")->required();
    phantom->add_option("--width", ph_width, "frame width");
    phantom->add_option("--height", ph_height, "frame height");
    phantom->add_option("--frames", ph_frames, "frame count");
    phantom->add_option("--motion", ph_motion, "still|drift|compression|jump");
    phantom->add_option("--drift-vx", ph_vx, "drift px/frame in x");
    phantom->add_option("--drift-vy", ph_vy, "drift px/frame in y");
    phantom->add_option("--compression-amplitude", ph_comp_amp, "axis modulation");
    phantom->add_option("--compression-period", ph_comp_period, "frames per cycle");
    phantom->add_option("--jump-frame", ph_jump_frame, "jump frame index");
    phantom->add_option("--jump-x", ph_jump_x, "jump offset x (px)");
    phantom->add_option("--jump-y", ph_jump_y, "jump offset y (px)");
    phantom->add_option("--diameter", ph_diameter, "vessel diameter (px)");
    phantom->add_option("--rng-seed", ph_rng, "random seed");
    phantom->add_flag("--no-speckle", ph_no_speckle, "disable speckle");

    // --- bench
    auto* bench = app.add_subcommand("bench", "per-frame pipeline timing report");
    int bench_frames = 100, bench_threads = 1;
    std::string bench_preset = "uhfus", bench_config;
    bench->add_option("--frames", bench_frames, "phantom frame count");
    bench->add_option("--preset", bench_preset, "uhfus|hfus|custom");
    bench->add_option("--config", bench_config, "key=value config override file");
    bench->add_option("--threads", bench_threads, "worker threads (default 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            SeedArg seed;
            if (!parse_seed(run_seed_text, seed)) {
                std::fprintf(stderr, "error: --seed must be X,Y\n");
                return 1;
            }
            return cmd_run(run_input, run_output, seed, run_preset, run_config,
                           run_threads, run_overlays, run_truth);
        }
        if (score->parsed()) return cmd_score(score_a, score_b, score_pitch);
        if (phantom->parsed())
            return cmd_phantom(ph_output, ph_width, ph_height, ph_frames, ph_motion,
                               ph_vx, ph_vy, ph_comp_amp, ph_comp_period,
                               ph_jump_frame, ph_jump_x, ph_jump_y, ph_diameter,
                               ph_no_speckle, ph_rng);
        if (bench->parsed())
            return cmd_bench(bench_frames, bench_preset, bench_config, bench_threads);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
