#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "vtrack/phantom.hpp"

using namespace vtrack;

namespace {

PhantomSpec small_spec() {
    PhantomSpec spec;
    spec.width = 128;
    spec.height = 96;
    spec.frames = 3;
    spec.vessel = {64.0, 48.0, 18.0, 14.0, 0.3};
    return spec;
}

} // namespace

TEST_CASE("generation is bit-identical for a fixed rng seed") {
    const PhantomSpec spec = small_spec();
    const PhantomResult a = generate(spec);
    const PhantomResult b = generate(spec);
    REQUIRE(a.frames.size() == 3);
    for (std::size_t t = 0; t < a.frames.size(); ++t)
        for (std::size_t i = 0; i < a.frames[t].size(); ++i)
            REQUIRE(a.frames[t].data[i] == b.frames[t].data[i]);

    PhantomSpec other = spec;
    other.rng_seed = 99;
    const PhantomResult c = generate(other);
    bool any_diff = false;
    for (std::size_t i = 0; i < c.frames[0].size(); ++i)
        any_diff |= c.frames[0].data[i] != a.frames[0].data[i];
    CHECK(any_diff);
}

TEST_CASE("a still noiseless phantom repeats the same frame") {
    PhantomSpec spec = small_spec();
    spec.speckle = SpeckleMode::none;
    spec.motion = MotionMode::still;
    const PhantomResult r = generate(spec);
    for (std::size_t t = 1; t < r.frames.size(); ++t)
        for (std::size_t i = 0; i < r.frames[0].size(); ++i)
            REQUIRE(r.frames[t].data[i] == r.frames[0].data[i]);

    // Noiseless intensities are exactly the three tissue classes.
    const GrayImage& img = r.frames[0];
    CHECK(img.at(64, 48) == spec.lumen_intensity);
    CHECK(img.at(5, 5) == spec.tissue_intensity);
    CHECK(img.at(64, 48 + 16) == Catch::Approx(1.3 * spec.tissue_intensity));
}

TEST_CASE("drift moves the truth ellipse linearly") {
    PhantomSpec spec = small_spec();
    spec.motion = MotionMode::longitudinal_drift;
    spec.drift_vx = 1.5;
    spec.drift_vy = -0.5;
    spec.frames = 10;
    const PhantomResult r = generate(spec);
    for (int t = 0; t < 10; ++t) {
        CHECK(r.truth[t].ellipse.cx == Catch::Approx(64.0 + 1.5 * t));
        CHECK(r.truth[t].ellipse.cy == Catch::Approx(48.0 - 0.5 * t));
        CHECK(r.truth[t].ellipse.a == 18.0);
    }
}

TEST_CASE("jump offsets the truth exactly at the jump frame") {
    PhantomSpec spec;
    spec.width = 256;
    spec.height = 128;
    spec.frames = 8;
    spec.vessel = {80.0, 64.0, 20.0, 20.0, 0.0};
    spec.motion = MotionMode::jump;
    spec.jump_frame = 5;
    spec.jump_offset = {40.0, 0.0};
    const PhantomResult r = generate(spec);
    CHECK(r.truth[4].ellipse.cx == 80.0);
    CHECK(r.truth[5].ellipse.cx == 120.0);
    CHECK(r.truth[7].ellipse.cx == 120.0);
    CHECK(r.truth[5].ellipse.cy == 64.0);
}

TEST_CASE("compression preserves the lumen area") {
    PhantomSpec spec;
    spec.width = 256;
    spec.height = 256;
    spec.frames = 50;
    spec.vessel = {128.0, 128.0, 30.0, 30.0, 0.0};
    spec.motion = MotionMode::compression;
    spec.compression_amplitude = 0.15;
    spec.compression_period = 25.0;
    const PhantomResult r = generate(spec);
    const double area0 = std::numbers::pi * 30.0 * 30.0;
    bool deformed = false;
    for (const auto& truth : r.truth) {
        const double area = std::numbers::pi * truth.ellipse.a * truth.ellipse.b;
        CHECK(area == Catch::Approx(area0).epsilon(0.05));
        deformed |= std::abs(truth.ellipse.a - 30.0) > 1.0;
    }
    CHECK(deformed);
}

TEST_CASE("speckle multiplier has unit mean in the lumen") {
    PhantomSpec spec;
    spec.width = 256;
    spec.height = 256;
    spec.frames = 2;
    spec.vessel = {128.0, 128.0, 60.0, 60.0, 0.0};
    spec.lumen_intensity = 25.0;
    const PhantomResult r = generate(spec);
    // > 10^4 interior samples; the sample mean of unit-mean Rayleigh
    // speckle times 25 must land within 2% of 25.
    double sum = 0.0;
    int n = 0;
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x)
            if (std::hypot(x - 128.0, y - 128.0) < 55.0) {
                sum += r.frames[0].at(x, y);
                ++n;
            }
    REQUIRE(n > 9000);
    CHECK(sum / n == Catch::Approx(25.0).epsilon(0.02));
}

TEST_CASE("generation rejects vessels that leave the image") {
    PhantomSpec spec = small_spec();
    spec.motion = MotionMode::longitudinal_drift;
    spec.drift_vx = 30.0;
    spec.frames = 5;
    CHECK_THROWS_AS(generate(spec), VesselOutOfBounds);

    PhantomSpec bad = small_spec();
    bad.lumen_intensity = -5.0;
    CHECK_THROWS_AS(generate(bad), BadConfig);
}
