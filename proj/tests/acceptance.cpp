// Acceptance gate: runs every release criterion end-to-end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "vtrack/io.hpp"
#include "vtrack/metrics.hpp"
#include "vtrack/phantom.hpp"
#include "vtrack/pipeline.hpp"

using namespace vtrack;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s: criterion %2d %-28s %s\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct SeqScores {
    double mean_dice = 0.0, min_dice = 1.0;
    double mean_hausdorff_mm = 0.0;
    double mean_mad_mm = 0.0;
};

SeqScores score_sequence(const std::vector<ContourResult>& got,
                         const std::vector<ContourResult>& truth, int width,
                         int height, double pitch_mm, std::size_t from = 0) {
    SeqScores s;
    std::size_t n = 0;
    for (std::size_t t = from; t < got.size(); ++t) {
        const RegionMask mg = rasterize(truth[t].points, width, height);
        const RegionMask ms = rasterize(got[t].points, width, height);
        const double d = dice(mg, ms);
        s.mean_dice += d;
        s.min_dice = std::min(s.min_dice, d);
        s.mean_hausdorff_mm += hausdorff_mm(truth[t].points, got[t].points, pitch_mm);
        s.mean_mad_mm += mad_mm(truth[t].points, got[t].points, pitch_mm);
        ++n;
    }
    s.mean_dice /= n;
    s.mean_hausdorff_mm /= n;
    s.mean_mad_mm /= n;
    return s;
}

// ------------------------------------------------------------- criterion 1
// Also produces the single-thread per-frame timings used by criterion 10.
std::vector<double> criterion_1_drift() {
    PhantomSpec spec; // 832x512, 100 frames, 70 px vessel diameter
    spec.motion = MotionMode::longitudinal_drift;
    spec.drift_vx = 2.0;
    const PhantomResult ph = generate(spec);

    SequenceConfig cfg = uhfus_preset();
    cfg.threads = 1;
    RunStats stats;
    const double t0 = now_s();
    std::vector<ContourResult> res;
    std::string err;
    try {
        res = run_sequence(ph.frames, {spec.vessel.cx, spec.vessel.cy}, cfg, &stats);
    } catch (const Error& e) {
        err = e.what();
    }
    const double total_s = now_s() - t0;

    if (res.size() != static_cast<std::size_t>(spec.frames)) {
        report(1, "drift-phantom accuracy", false,
               "tracking did not complete: " + err);
        return {};
    }
    const SeqScores s =
        score_sequence(res, ph.truth, spec.width, spec.height, cfg.pixel_pitch_mm);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "meanDice=%.4f (>=0.90) meanH=%.4fmm (<=0.15) total=%.1fs (<=60)",
                  s.mean_dice, s.mean_hausdorff_mm, total_s);
    report(1, "drift-phantom accuracy",
           s.mean_dice >= 0.90 && s.mean_hausdorff_mm <= 0.15 && total_s <= 60.0,
           buf);
    return stats.frame_ms;
}

// ------------------------------------------------------------- criterion 2
void criterion_2_jump() {
    PhantomSpec spec;
    spec.motion = MotionMode::jump;
    spec.jump_frame = 50;
    spec.jump_offset = {40.0, 0.0};
    const PhantomResult ph = generate(spec);

    SequenceConfig cfg = uhfus_preset();
    cfg.threads = 1;
    std::vector<ContourResult> res;
    std::string err;
    try {
        res = run_sequence(ph.frames, {spec.vessel.cx, spec.vessel.cy}, cfg);
    } catch (const Error& e) {
        err = e.what();
    }
    if (res.size() != static_cast<std::size_t>(spec.frames)) {
        report(2, "large-motion recovery", false, "tracking failed: " + err);
        return;
    }
    const bool switched = res[50].seed_used == SeedSource::cluster;
    const SeqScores s = score_sequence(res, ph.truth, spec.width, spec.height,
                                       cfg.pixel_pitch_mm, 50);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "frame-50 seed=%s (cluster) post-jump meanDice=%.4f (>=0.88)",
                  seed_source_name(res[50].seed_used), s.mean_dice);
    report(2, "large-motion recovery", switched && s.mean_dice >= 0.88, buf);
}

// ------------------------------------------------------------- criterion 3
void criterion_3_hfus() {
    PhantomSpec spec;
    spec.width = 280;
    spec.height = 534;
    spec.frames = 250;
    spec.vessel = {140.0, 200.0, 30.0, 30.0, 0.0};
    spec.motion = MotionMode::longitudinal_drift;
    spec.drift_vy = 0.5;
    const PhantomResult ph = generate(spec);

    SequenceConfig cfg = hfus_preset();
    cfg.threads = 1;
    std::vector<ContourResult> res;
    std::string err;
    try {
        res = run_sequence(ph.frames, {spec.vessel.cx, spec.vessel.cy}, cfg);
    } catch (const Error& e) {
        err = e.what();
    }
    if (res.size() != static_cast<std::size_t>(spec.frames)) {
        report(3, "coarse-pitch preset transfer", false, "tracking failed: " + err);
        return;
    }
    const SeqScores s =
        score_sequence(res, ph.truth, spec.width, spec.height, cfg.pixel_pitch_mm);
    char buf[120];
    std::snprintf(buf, sizeof buf, "250 frames complete, meanMAD=%.4fmm (<=0.10)",
                  s.mean_mad_mm);
    report(3, "coarse-pitch preset transfer", s.mean_mad_mm <= 0.10, buf);
}

// ------------------------------------------------------------- criterion 4
void criterion_4_bandpass() {
    const CauchyParams p{10.0, 1.0};
    const bool dc_zero = cauchy_gain(0.0, 0.0, p) == 0.0;

    // Coarse grid to bracket the maximum, then golden-section refinement.
    double best_r = 0.0, best_g = -1.0;
    for (int i = 1; i <= 5000; ++i) {
        const double r = 0.5 * i / 5000.0;
        const double g = cauchy_gain(r, 0.0, p);
        if (g > best_g) {
            best_g = g;
            best_r = r;
        }
    }
    double lo = best_r - 0.5 / 5000.0, hi = best_r + 0.5 / 5000.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    while (hi - lo > 1e-12) {
        const double m1 = hi - gr * (hi - lo);
        const double m2 = lo + gr * (hi - lo);
        if (cauchy_gain(m1, 0.0, p) < cauchy_gain(m2, 0.0, p)) lo = m1;
        else hi = m2;
    }
    const double argmax = (lo + hi) / 2.0;
    const double want_peak = 0.1 * std::exp(-1.0);
    const double peak = cauchy_gain(p.u / p.w0, 0.0, p);

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gain(0)=%g argmax=%.9f (u/w0=0.1, tol 1e-6) peak err=%.2e",
                  cauchy_gain(0.0, 0.0, p), argmax, std::abs(peak - want_peak));
    report(4, "band-pass analytics",
           dc_zero && std::abs(argmax - p.u / p.w0) <= 1e-6 &&
               std::abs(peak - want_peak) <= 1e-9,
           buf);
}

// ------------------------------------------------------------- criterion 5
void criterion_5_fa_range() {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    const CauchyParams cp{10.0, 1.0};
    const FAParams fp{};
    bool ok = true;
    double global_min = 1.0, global_max = 0.0;
    auto scan = [&](const GrayImage& img) {
        const GrayImage fa = feature_asymmetry_map(img, cp, fp);
        for (double v : fa.data) {
            ok = ok && std::isfinite(v) && v >= 0.0 && v <= 1.0;
            global_min = std::min(global_min, v);
            global_max = std::max(global_max, v);
        }
    };
    for (int trial = 0; trial < 50; ++trial) {
        GrayImage img(48, 40);
        for (auto& v : img.data) v = u(rng);
        scan(img);
    }
    // Structured set: constant, ramp, step, disk, grating.
    GrayImage constant(32, 32, 100.0);
    scan(constant);
    GrayImage ramp(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) ramp.at(x, y) = 4.0 * x;
    scan(ramp);
    GrayImage step(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) step.at(x, y) = x < 32 ? 20.0 : 220.0;
    scan(step);
    GrayImage disk(64, 64, 180.0);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (std::hypot(x - 32.0, y - 32.0) < 14.0) disk.at(x, y) = 25.0;
    scan(disk);
    GrayImage grating(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            grating.at(x, y) = 128.0 + 100.0 * std::cos(2.0 * M_PI * 5.0 * x / 64.0);
    scan(grating);

    char buf[120];
    std::snprintf(buf, sizeof buf, "55 images, FA in [%.3g, %.3g] (must be [0,1])",
                  global_min, global_max);
    report(5, "feature-asymmetry range", ok, buf);
}

// ------------------------------------------------------------- criterion 6
void criterion_6_ellipse() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> c(-100.0, 100.0);
    std::uniform_real_distribution<double> ax(5.0, 60.0);
    std::uniform_real_distribution<double> th(-M_PI / 2.0, M_PI / 2.0);
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        EllipseParams truth{c(rng), c(rng), ax(rng), ax(rng), th(rng)};
        if (truth.a < truth.b) std::swap(truth.a, truth.b);
        EllipseParams fit;
        try {
            fit = fit_ellipse(sample_ellipse(truth, 36));
        } catch (const Error&) {
            ok = false;
            continue;
        }
        double err = std::max({std::abs(fit.cx - truth.cx), std::abs(fit.cy - truth.cy),
                               std::abs(fit.a - truth.a), std::abs(fit.b - truth.b)});
        if (truth.a - truth.b > 1e-3) { // theta undefined for circles
            double dt = std::fmod(std::abs(fit.theta - truth.theta), M_PI);
            dt = std::min(dt, M_PI - dt);
            err = std::max(err, dt);
        }
        worst = std::max(worst, err);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "100 ellipses, worst parameter error=%.2e (<=1e-6)",
                  worst);
    report(6, "ellipse-fit recovery", ok && worst <= 1e-6, buf);
}

// ------------------------------------------------------------- criterion 7
void criterion_7_edt() {
    std::mt19937_64 rng(707);
    std::bernoulli_distribution coin(0.03);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        RegionMask mask(64, 64);
        for (auto& b : mask.bits) b = coin(rng);
        if (mask.count() == 0) mask.at(trial % 64, trial / 64) = 1;
        const auto got = edt_squared(mask);
        for (int y = 0; y < 64 && ok; ++y)
            for (int x = 0; x < 64 && ok; ++x) {
                double want = 1e18;
                for (int sy = 0; sy < 64; ++sy)
                    for (int sx = 0; sx < 64; ++sx)
                        if (mask.at(sx, sy))
                            want = std::min(want,
                                            static_cast<double>(x - sx) * (x - sx) +
                                                static_cast<double>(y - sy) * (y - sy));
                ok = got[static_cast<std::size_t>(y) * 64 + x] == want;
            }
    }
    report(7, "distance-transform oracle", ok,
           ok ? "200 random 64x64 masks match brute force exactly"
              : "mismatch against brute force");
}

// ------------------------------------------------------------- criterion 8
void criterion_8_disk() {
    GrayImage img(128, 128, 200.0);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            if (std::hypot(x - 64.0, y - 64.0) <= 25.0) img.at(x, y) = 20.0;
    DrlseParams params;
    const LevelSetField phi =
        drlse_evolve(init_lsf({64, 64, 18, 18, 0}, 1.0, 128, 128, params.c0), img,
                     params, 1);
    bool finite = true;
    for (double v : phi.data) finite = finite && std::isfinite(v);
    const auto contour = extract_contour(phi);
    double worst = 0.0;
    for (const Point& p : contour)
        worst = std::max(worst, std::abs(std::hypot(p.x - 64.0, p.y - 64.0) - 25.0));
    const double mg = mean_gradient_narrowband(phi, params.narrowband_halfwidth);
    char buf[140];
    std::snprintf(buf, sizeof buf,
                  "maxerr=%.3fpx (<=1.5) mean|grad|=%.3f (in [0.8,1.2]) finite=%d",
                  worst, mg, finite ? 1 : 0);
    report(8, "level-set disk convergence",
           finite && worst <= 1.5 && mg >= 0.8 && mg <= 1.2, buf);
}

// ------------------------------------------------------------- criterion 9
void criterion_9_ekf() {
    bool ok = true;
    EkfParams p;

    // Fixed point of a stationary state.
    TrackerState st;
    st.x = Eigen::Vector4d{120.0, 80.0, 25.0, 18.0};
    st.x_prev = st.x;
    const auto [x_pred, p_pred0] = ekf_predict(st, p);
    for (int i = 0; i < 4; ++i) ok = ok && x_pred(i) == st.x(i);

    // R -> 0: the update returns the measurement.
    {
        EkfParams pz = p;
        pz.R = Eigen::Matrix4d::Zero();
        const Eigen::Vector4d z{1.0, 2.0, 3.0, 4.0};
        const KalmanUpdate upd =
            ekf_update(Eigen::Vector4d::Constant(9.0),
                       5.0 * Eigen::Matrix4d::Identity(), z, pz);
        for (int i = 0; i < 4; ++i) ok = ok && std::abs(upd.x(i) - z(i)) <= 1e-12;
    }
    // R -> infinity: the update keeps the prediction.
    {
        EkfParams pi = p;
        pi.R = 1e12 * Eigen::Matrix4d::Identity();
        const Eigen::Vector4d xp = Eigen::Vector4d::Constant(7.0);
        const KalmanUpdate upd = ekf_update(
            xp, 10.0 * Eigen::Matrix4d::Identity(),
            Eigen::Vector4d::Constant(1000.0), pi);
        for (int i = 0; i < 4; ++i) ok = ok && std::abs(upd.x(i) - 7.0) <= 1e-6;
    }

    // 1000 random predict/update cycles: P stays symmetric PSD.
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    st.P = p.P0;
    double min_eig = 0.0;
    for (int cycle = 0; cycle < 1000; ++cycle) {
        const auto [xp, pp] = ekf_predict(st, p);
        Eigen::Vector4d z = xp;
        for (int i = 0; i < 4; ++i) z(i) += u(rng);
        const KalmanUpdate upd = ekf_update(xp, pp, z, p);
        st.x_prev = st.x;
        st.x = upd.x;
        st.P = upd.P;
        ok = ok && (st.P - st.P.transpose()).norm() < 1e-12;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(st.P);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        ok = ok && es.eigenvalues().minCoeff() >= -1e-9;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "fixed point + R limits exact, min eig over 1000 cycles=%.2e",
                  min_eig);
    report(9, "state-estimator contracts", ok, buf);
}

// ------------------------------------------------------------ criterion 10
void criterion_10_latency(const std::vector<double>& single_thread_ms) {
    if (single_thread_ms.empty()) {
        report(10, "per-frame latency budget", false,
               "no timings (criterion 1 did not complete)");
        return;
    }
    double sum = 0.0;
    for (double m : single_thread_ms) sum += m;
    const double mean_1t = sum / single_thread_ms.size();

    // Multi-threaded figure, documented alongside the single-thread budget.
    PhantomSpec spec;
    spec.frames = 20;
    spec.motion = MotionMode::longitudinal_drift;
    spec.drift_vx = 2.0;
    const PhantomResult ph = generate(spec);
    SequenceConfig cfg = uhfus_preset();
    cfg.threads = 0; // all cores
    RunStats stats;
    double mean_mt = 0.0;
    try {
        run_sequence(ph.frames, {spec.vessel.cx, spec.vessel.cy}, cfg, &stats);
        for (double m : stats.frame_ms) mean_mt += m;
        mean_mt /= stats.frame_ms.size();
    } catch (const Error&) {
    }

    char buf[140];
    std::snprintf(buf, sizeof buf,
                  "mean=%.1fms/frame single-thread (<=100), %.1fms all-cores, "
                  "832x512 input",
                  mean_1t, mean_mt);
    report(10, "per-frame latency budget", mean_1t <= 100.0, buf);
}

} // namespace

int main() {
    const std::vector<double> timings = criterion_1_drift();
    criterion_2_jump();
    criterion_3_hfus();
    criterion_4_bandpass();
    criterion_5_fa_range();
    criterion_6_ellipse();
    criterion_7_edt();
    criterion_8_disk();
    criterion_9_ekf();
    criterion_10_latency(timings);
    if (failures > 0) {
        std::printf("ACCEPTANCE: %d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all 10 criteria passed\n");
    return 0;
}
