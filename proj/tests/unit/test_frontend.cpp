#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stmd/errors.hpp"
#include "stmd/frontend.hpp"

using namespace stmd;

namespace {

FrameRing ring_of(const std::vector<Grid2D>& frames) {
    FrameRing ring(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) ring.push(static_cast<std::int64_t>(i), frames[i]);
    return ring;
}

}  // namespace

TEST_SUITE("frontend") {

TEST_CASE("retina keeps a constant grid constant") {
    const Grid2D c(9, 11, 0.42f);
    const Grid2D out = retina_smooth(c, RetinaConfig{});
    for (float v : out.values()) CHECK(v == doctest::Approx(0.42).epsilon(1e-6));
}

TEST_CASE("retina spreads a bright pixel into a symmetric blob with the same mass") {
    Grid2D g(11, 11);
    g.at(5, 5) = 1.0f;
    const Grid2D out = retina_smooth(g, RetinaConfig{});
    CHECK(std::abs(out.sum() - 1.0) < 1e-6);
    for (std::size_t d = 1; d <= 2; ++d) {
        CHECK(out.at(5, 5 - d) == out.at(5, 5 + d));
        CHECK(out.at(5 - d, 5) == out.at(5 + d, 5));
        CHECK(out.at(5 - d, 5) == out.at(5, 5 - d));
    }
    CHECK(out.at(5, 5) == out.max_value());
}

TEST_CASE("retina equals brute-force 2D Gaussian convolution") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Grid2Dd g = testing::random_grid<double>(8, 8, seed, 0.0, 1.0);
        std::vector<double> taps;
        double total = 0.0;
        for (int i = -2; i <= 2; ++i) {
            taps.push_back(std::exp(-i * i / 2.0));
            total += taps.back();
        }
        for (double& t : taps) t /= total;
        const Grid2Dd fast = retina_smooth(g, RetinaConfig{1.0, 2});
        CHECK(testing::max_abs_diff(fast, testing::brute_convolve(g, taps, taps)) < 1e-9);
    }
}

TEST_CASE("plain lamina of a constant sequence is zero") {
    const Grid2D c(4, 5, 0.3f);
    const Grid2D out = lamina_filter(ring_of({c, c}), LaminaConfig{LaminaMode::plain_diff, 1.0, 2});
    for (float v : out.values()) CHECK(v == 0.0f);
}

TEST_CASE("plain lamina of a ramp is the slope") {
    const double slope = 0.125;
    std::vector<Grid2D> frames;
    for (int t = 0; t < 6; ++t) frames.push_back(Grid2D(3, 3, static_cast<float>(slope * t)));
    FrameRing ring(2);
    const Lamina lamina(LaminaConfig{LaminaMode::plain_diff, 1.0, 2});
    for (int t = 0; t < 6; ++t) {
        ring.push(t, frames[static_cast<std::size_t>(t)]);
        if (t == 0) {
            CHECK_THROWS_AS(lamina.apply(ring), WarmupError);
            continue;
        }
        const Grid2D out = lamina.apply(ring);
        for (float v : out.values()) CHECK(v == doctest::Approx(slope));
    }
}

TEST_CASE("alpha 1 with two frames of memory is plain differentiation") {
    const std::vector<double> w = fractional_weights(1.0, 2);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == -1.0);
    const Grid2D a = testing::random_grid(4, 4, 1);
    const Grid2D b = testing::random_grid(4, 4, 2);
    const FrameRing ring = ring_of({a, b});
    CHECK(lamina_filter(ring, LaminaConfig{LaminaMode::fractional, 1.0, 2}) ==
          lamina_filter(ring, LaminaConfig{LaminaMode::plain_diff, 1.0, 2}));
}

TEST_CASE("alpha 0.5 weights by hand") {
    const std::vector<double> w = fractional_weights(0.5, 4);
    const double expected[] = {1.0, -0.5, -0.125, -0.0625};
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(w[k] - expected[k]) < 1e-15);
}

TEST_CASE("fractional weights: w0 = 1, negative tail, partial sums fall toward zero") {
    for (double alpha : {0.1, 0.3, 0.5, 0.8, 0.9, 0.99}) {
        const std::vector<double> w = fractional_weights(alpha, 64);
        CHECK(w[0] == 1.0);
        double partial = 1.0;
        for (std::size_t k = 1; k < w.size(); ++k) {
            CHECK(w[k] < 0.0);
            const double next = partial + w[k];
            CHECK(next < partial);
            CHECK(next > 0.0);
            partial = next;
        }
    }
}

TEST_CASE("fractional lamina of a constant leaves the finite-memory residue") {
    const float c = 0.6f;
    double previous = 1e9;
    for (std::size_t mem : {2u, 4u, 10u, 20u, 40u}) {
        const std::vector<double> w = fractional_weights(0.8, mem);
        double residue = 0.0;
        for (double x : w) residue += x;
        std::vector<Grid2D> frames(mem, Grid2D(3, 3, c));
        const Grid2D out = lamina_filter(ring_of(frames), LaminaConfig{LaminaMode::fractional, 0.8, mem});
        for (float v : out.values()) CHECK(v == doctest::Approx(residue * c).epsilon(1e-5));
        CHECK(residue > 0.0);
        CHECK(residue < previous);
        previous = residue;
    }
}

TEST_CASE("fractional lamina matches the weighted sum oracle") {
    const std::size_t mem = 10;
    std::vector<Grid2D> frames;
    for (std::size_t t = 0; t < mem; ++t) frames.push_back(testing::random_grid(5, 6, 40 + t, 0.0, 1.0));
    const FrameRing ring = ring_of(frames);
    const Grid2D out = lamina_filter(ring, LaminaConfig{LaminaMode::fractional, 0.7, mem});
    for (std::size_t r = 0; r < 5; ++r) {
        for (std::size_t c = 0; c < 6; ++c) {
            double w = 1.0, acc = frames[mem - 1].at(r, c);
            for (std::size_t k = 1; k < mem; ++k) {
                w *= (static_cast<double>(k) - 1.0 - 0.7) / static_cast<double>(k);
                acc += w * frames[mem - 1 - k].at(r, c);
            }
            CHECK(out.at(r, c) == doctest::Approx(acc).epsilon(1e-5));
        }
    }
}

TEST_CASE("lamina config validation") {
    CHECK_THROWS_AS(Lamina(LaminaConfig{LaminaMode::fractional, 0.0, 10}), ParameterError);
    CHECK_THROWS_AS(Lamina(LaminaConfig{LaminaMode::fractional, 1.5, 10}), ParameterError);
    CHECK_THROWS_AS(Lamina(LaminaConfig{LaminaMode::fractional, 0.8, 1}), ParameterError);
    CHECK(Lamina(LaminaConfig{}).weights().size() == 10);
}

TEST_CASE("split_on_off") {
    const OnOffSignals s = split_on_off(Grid2D::from_values(1, 2, {1.0f, -1.0f}));
    CHECK(s.on == Grid2D::from_values(1, 2, {1.0f, 0.0f}));
    CHECK(s.off == Grid2D::from_values(1, 2, {0.0f, 1.0f}));
    const OnOffSignals z = split_on_off(Grid2D(3, 3));
    CHECK(z.on == Grid2D(3, 3));
    CHECK(z.off == Grid2D(3, 3));
    const Grid2D r = testing::random_grid(6, 6, 77);
    const OnOffSignals p = split_on_off(r);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(p.on.values()[i] - p.off.values()[i] == r.values()[i]);
}

}  // TEST_SUITE
