#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vtrack/preprocess.hpp"

using namespace vtrack;

namespace {

GrayImage random_image(int w, int h, uint64_t seed, double lo = 0.0, double hi = 255.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    GrayImage img(w, h);
    for (auto& v : img.data) v = u(rng);
    return img;
}

// Straightforward O(n * k^2) bilateral reference.
GrayImage bilateral_oracle(const GrayImage& img, int kernel, double ss, double sr) {
    const int r = kernel / 2;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double c = img.at(x, y);
            double wsum = 0.0, vsum = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const double v = img.at_clamped(x + dx, y + dy);
                    const double w = std::exp(-0.5 * (dx * dx + dy * dy) / (ss * ss)) *
                                     std::exp(-0.5 * (v - c) * (v - c) / (sr * sr));
                    wsum += w;
                    vsum += w * v;
                }
            out.at(x, y) = vsum / wsum;
        }
    return out;
}

} // namespace

TEST_CASE("downsample is an exact block mean") {
    const GrayImage img = random_image(17, 13, 1);
    const GrayImage out = downsample(img, 4);
    REQUIRE(out.width == 4);
    REQUIRE(out.height == 3);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            double sum = 0.0;
            for (int dy = 0; dy < 4; ++dy)
                for (int dx = 0; dx < 4; ++dx) sum += img.at(4 * x + dx, 4 * y + dy);
            CHECK(out.at(x, y) == Catch::Approx(sum / 16.0).margin(1e-9));
        }
}

TEST_CASE("downsample by 1 is the identity") {
    const GrayImage img = random_image(9, 7, 2);
    const GrayImage out = downsample(img, 1);
    REQUIRE(out.same_dims(img));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(out.data[i] == img.data[i]);
}

TEST_CASE("downsample rejects bad input") {
    CHECK_THROWS_AS(downsample(GrayImage(3, 3, 0.0), 0), BadConfig);
    CHECK_THROWS_AS(downsample(GrayImage(3, 3, 0.0), 4), ImageTooSmall);
}

TEST_CASE("bilateral filter matches the brute-force reference") {
    const GrayImage img = random_image(20, 15, 3);
    const GrayImage got = bilateral_filter(img, 5, 2.0, 25.0, 1);
    const GrayImage want = bilateral_oracle(img, 5, 2.0, 25.0);
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(got.data[i] == Catch::Approx(want.data[i]).margin(1e-12));
}

TEST_CASE("bilateral filter is deterministic across thread counts") {
    const GrayImage img = random_image(33, 21, 4);
    const GrayImage t1 = bilateral_filter(img, 5, 2.0, 25.0, 1);
    const GrayImage t3 = bilateral_filter(img, 5, 2.0, 25.0, 3);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(t1.data[i] == t3.data[i]);
}

TEST_CASE("bilateral filter preserves a binary step edge position") {
    GrayImage img(40, 20);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 40; ++x) img.at(x, y) = x < 20 ? 0.0 : 255.0;
    const GrayImage out = bilateral_filter(img, 5, 2.0, 25.0, 1);
    for (int y = 0; y < 20; ++y) {
        // The 50% crossing stays between the original edge columns.
        CHECK(out.at(19, y) < 127.5);
        CHECK(out.at(20, y) > 127.5);
        // Far from the edge the halves stay flat.
        CHECK(out.at(5, y) == Catch::Approx(0.0).margin(1e-6));
        CHECK(out.at(35, y) == Catch::Approx(255.0).margin(1e-6));
    }
}

TEST_CASE("bilateral filter rejects invalid kernels") {
    const GrayImage img = random_image(8, 8, 5);
    CHECK_THROWS_AS(bilateral_filter(img, 4, 2.0, 25.0), BadKernel);
    CHECK_THROWS_AS(bilateral_filter(img, 1, 2.0, 25.0), BadKernel);
    CHECK_THROWS_AS(bilateral_filter(img, 5, -1.0, 25.0), BadConfig);
}

TEST_CASE("cluster map partitions the image into root-anchored patches") {
    const GrayImage img = random_image(24, 18, 6);
    const ClusterMap cm = cluster(img, 3);

    // Every pixel resolves to a root, and roots are fixed points.
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int r = cm.root_of[i];
        REQUIRE(r >= 0);
        CHECK(cm.root_of[r] == r);
    }
    for (int r : cm.roots) CHECK(cm.is_root(r));

    // Patch means match a direct recount of the members.
    std::vector<double> sum(img.size(), 0.0);
    std::vector<int> count(img.size(), 0);
    for (std::size_t i = 0; i < img.size(); ++i) {
        sum[cm.root_of[i]] += img.data[i];
        ++count[cm.root_of[i]];
    }
    int found_roots = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (count[i] > 0) {
            ++found_roots;
            CHECK(cm.patch_mean[i] == Catch::Approx(sum[i] / count[i]).margin(1e-12));
        }
    CHECK(found_roots == static_cast<int>(cm.roots.size()));
}

TEST_CASE("cluster root of a homogeneous patch lands in the flattest area") {
    // Dark flat square in a noisy field: the darkest cluster mean must
    // be close to the dark square's intensity.
    GrayImage img = random_image(40, 40, 7, 100.0, 200.0);
    for (int y = 10; y < 24; ++y)
        for (int x = 12; x < 26; ++x) img.at(x, y) = 20.0;
    const ClusterMap cm = cluster(img, 3);
    double best_mean = 1e9;
    Point best{0, 0};
    for (int r : cm.roots)
        if (cm.patch_mean[r] < best_mean) {
            best_mean = cm.patch_mean[r];
            best = cm.root_point(r);
        }
    CHECK(best_mean < 40.0);
    CHECK(best.x >= 12.0);
    CHECK(best.x < 26.0);
    CHECK(best.y >= 10.0);
    CHECK(best.y < 24.0);
}

TEST_CASE("cluster rejects invalid kernels") {
    CHECK_THROWS_AS(cluster(GrayImage(8, 8, 0.0), 4), BadKernel);
}
