#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../common/oracles.hpp"
#include "helpers.hpp"
#include "stmd/classical.hpp"
#include "stmd/detectors.hpp"
#include "stmd/errors.hpp"
#include "stmd/synthgen.hpp"

using namespace stmd;

namespace {

FrameRing push_all(const std::vector<Grid2D>& frames) {
    FrameRing ring(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) ring.push(static_cast<std::int64_t>(i), frames[i]);
    return ring;
}

OnOffRing push_lamina(const std::vector<Grid2D>& lamina) {
    OnOffRing ring(lamina.size());
    for (std::size_t i = 0; i < lamina.size(); ++i) ring.push(static_cast<std::int64_t>(i), rectify_pair(lamina[i]));
    return ring;
}

oracle::Frames widen(const std::vector<Grid2D>& frames) {
    oracle::Frames out;
    for (const Grid2D& f : frames) out.push_back(grid_cast<double>(f));
    return out;
}

// 1 x width strip: background 1, dark bar [x0, x0 + len) at 0 with area coverage.
Grid2D strip(std::size_t width, double x0, double len) {
    Grid2D g(1, width, 1.0f);
    for (std::size_t j = 0; j < width; ++j) {
        const double lo = std::max(static_cast<double>(j), x0);
        const double hi = std::min(static_cast<double>(j) + 1.0, x0 + len);
        if (hi > lo) g.at(0, j) = static_cast<float>(1.0 - (hi - lo));
    }
    return g;
}

std::vector<Grid2D> plain_diff(const std::vector<Grid2D>& frames) {
    std::vector<Grid2D> out;
    for (std::size_t t = 1; t < frames.size(); ++t) {
        Grid2D d(frames[t].height(), frames[t].width());
        for (std::size_t i = 0; i < d.size(); ++i) d.values()[i] = frames[t].values()[i] - frames[t - 1].values()[i];
        out.push_back(d);
    }
    return out;
}

}  // namespace

TEST_SUITE("classical_detectors") {

TEST_CASE("HR on a constant field is c squared") {
    const float c = 0.6f;
    const FrameRing ring = push_all({Grid2D(6, 6, c), Grid2D(6, 6, c)});
    const Grid2D out = hr_detect(ring, EmdConfig{});
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t col = 1; col < 6; ++col) CHECK(out.at(r, col) == doctest::Approx(c * c));
    // The shifted sample falls outside the grid in column 0.
    CHECK(out.at(0, 0) == 0.0f);
}

TEST_CASE("HR with an all-zero delayed frame is zero") {
    const FrameRing ring = push_all({Grid2D(5, 5), testing::random_grid(5, 5, 1, 0.0, 1.0)});
    const Grid2D out = hr_detect(ring, EmdConfig{});
    for (float v : out.values()) CHECK(v == 0.0f);
}

TEST_CASE("HR on a rightward edge matches the formula") {
    std::vector<Grid2D> frames;
    for (int t = 0; t < 6; ++t) {
        Grid2D g(1, 16);
        for (int j = 0; j < 16; ++j) g.at(0, static_cast<std::size_t>(j)) = j <= 3 + t ? 1.0f : 0.0f;
        frames.push_back(g);
    }
    FrameRing ring(2);
    EmdConfig cfg;
    cfg.delay_tau = 1;
    cfg.offset = {-1, 0};
    for (std::size_t t = 0; t < frames.size(); ++t) {
        ring.push(static_cast<std::int64_t>(t), frames[t]);
        if (t == 0) continue;
        const Grid2D out = hr_detect(ring, cfg);
        const oracle::Frames f = widen({frames[t - 1], frames[t]});
        CHECK(oracle::max_rel_error(out, oracle::hr(f, 1, -1, 0)) == 0.0);
        // The newly lit pixel at the edge sees its left neighbour lit one frame earlier.
        CHECK(out.at(0, static_cast<std::size_t>(3 + t)) == 1.0f);
    }
}

TEST_CASE("HR mirrored input with mirrored offset gives the mirrored response") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Grid2D a = testing::random_grid(6, 7, seed, 0.0, 1.0);
        const Grid2D b = testing::random_grid(6, 7, seed + 50, 0.0, 1.0);
        auto mirror = [](const Grid2D& g) {
            Grid2D m(g.height(), g.width());
            for (std::size_t r = 0; r < g.height(); ++r)
                for (std::size_t c = 0; c < g.width(); ++c) m.at(r, g.width() - 1 - c) = g.at(r, c);
            return m;
        };
        EmdConfig left;
        left.offset = {-1, 0};
        EmdConfig right;
        right.offset = {1, 0};
        const Grid2D out = hr_detect(push_all({a, b}), left);
        const Grid2D out_m = hr_detect(push_all({mirror(a), mirror(b)}), right);
        CHECK(out_m == mirror(out));
    }
}

TEST_CASE("BL ratio of equal frames is about one") {
    const float c = 0.8f;
    const Grid2D out = bl_detect(push_all({Grid2D(5, 5, c), Grid2D(5, 5, c)}), EmdConfig{});
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t col = 1; col < 5; ++col) CHECK(std::abs(out.at(r, col) - 1.0) < 1.01e-3 / c);
}

TEST_CASE("BL with a zero current frame is zero") {
    const Grid2D out = bl_detect(push_all({testing::random_grid(4, 4, 3, 0.0, 1.0), Grid2D(4, 4)}), EmdConfig{});
    for (float v : out.values()) CHECK(v == 0.0f);
}

TEST_CASE("BL and HR/BL match the scalar oracles") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<Grid2D> frames;
        for (int t = 0; t < 8; ++t) frames.push_back(testing::random_grid(6, 6, seed * 10 + static_cast<std::uint64_t>(t), 0.05, 1.0));
        const FrameRing ring = push_all(frames);
        const oracle::Frames f = widen(frames);
        EmdConfig cfg;
        cfg.delay_tau = 2;
        cfg.offset = {0, 1};
        cfg.second_delay = 3;
        cfg.second_offset = {1, -1};
        CHECK(oracle::max_rel_error(bl_detect(ring, cfg), oracle::bl(f, 2, 0, 1, 1e-3)) < 1e-4);
        CHECK(oracle::max_rel_error(hrbl_detect(ring, cfg), oracle::hrbl(f, 2, 0, 1, 3, 1, -1, 1e-3)) < 1e-4);
    }
}

TEST_CASE("HR/BL special cases") {
    const Grid2D ones(5, 5, 1.0f);
    const Grid2D out = hrbl_detect(push_all({ones, ones}), EmdConfig{});
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 1; c < 4; ++c) CHECK(out.at(r, c) == doctest::Approx(1.0 / 1.001));
    const Grid2D zero = hrbl_detect(push_all({Grid2D(5, 5), ones}), EmdConfig{});
    for (float v : zero.values()) CHECK(v == 0.0f);
}

TEST_CASE("EMD warm-up and parameter checks") {
    EmdConfig cfg;
    cfg.delay_tau = 2;
    CHECK_THROWS_AS(hr_detect(push_all({Grid2D(3, 3), Grid2D(3, 3)}), cfg), WarmupError);
    cfg.delay_tau = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    EmdConfig guard;
    guard.division_guard = 0.0;
    CHECK_THROWS_AS(guard.validate(), ParameterError);
}

TEST_CASE("ESTMD single coincidence") {
    const std::size_t tau = 3;
    const float a = 0.7f, b = 0.4f;
    std::vector<Grid2D> lamina(tau + 1, Grid2D(5, 5));
    lamina[0].at(2, 3) = -b;    // OFF at t0
    lamina[tau].at(2, 3) = a;   // ON at t0 + tau
    const Grid2D out = estmd_detect(push_lamina(lamina), tau);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c) CHECK(out.at(r, c) == ((r == 2 && c == 3) ? a * b : 0.0f));
}

TEST_CASE("ESTMD with ON only is zero") {
    std::vector<Grid2D> lamina;
    for (int t = 0; t < 5; ++t) lamina.push_back(testing::random_grid(4, 4, static_cast<std::uint64_t>(t), 0.0, 1.0));
    const Grid2D out = estmd_detect(push_lamina(lamina), 4);
    for (float v : out.values()) CHECK(v == 0.0f);
}

TEST_CASE("ESTMD dark bar peaks at the trailing edge and matches the oracle") {
    for (double v : {1.0, 2.0, 5.0}) {
        const std::size_t tau = static_cast<std::size_t>(std::ceil(5.0 / v));
        std::vector<Grid2D> frames;
        const int count = static_cast<int>((32.0 - 9.0) / v) + 1;
        for (int t = 0; t < count; ++t) frames.push_back(strip(32, 4.0 + v * t, 5.0));
        const std::vector<Grid2D> lamina = plain_diff(frames);
        OnOffRing ring(tau + 1);
        for (std::size_t t = 0; t < lamina.size(); ++t) {
            ring.push(static_cast<std::int64_t>(t), rectify_pair(lamina[t]));
            if (ring.depth() <= tau) continue;
            const Grid2D out = estmd_detect(ring, tau);
            const oracle::Frames lam = widen(std::vector<Grid2D>(lamina.begin(), lamina.begin() + static_cast<long>(t) + 1));
            CHECK(oracle::max_rel_error(out, oracle::estmd(lam, tau)) < 1e-4);
            // Frame t + 1 of the strip; the bar's left edge is at 4 + v (t + 1).
            const double left = 4.0 + v * static_cast<double>(t + 1);
            std::size_t peak = 0;
            for (std::size_t j = 1; j < 32; ++j)
                if (out.at(0, j) > out.at(0, peak)) peak = j;
            REQUIRE(out.at(0, peak) > 0.0f);
            CHECK(static_cast<double>(peak) < left);
            CHECK(static_cast<double>(peak) >= left - v);
        }
    }
}

TEST_CASE("ESTMD summed response peaks at the matched delay") {
    const double len = 5.0;
    for (double v : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        std::vector<Grid2D> frames;
        const int steps = static_cast<int>(std::ceil(40.0 / v));
        for (int t = 0; t <= steps; ++t) frames.push_back(strip(64, 4.0 + v * t, len));
        const std::vector<Grid2D> lamina = plain_diff(frames);
        std::size_t best_tau = 0;
        double best = -1.0;
        for (std::size_t tau = 1; tau <= 12; ++tau) {
            OnOffRing ring(tau + 1);
            double total = 0.0;
            for (std::size_t t = 0; t < lamina.size(); ++t) {
                ring.push(static_cast<std::int64_t>(t), rectify_pair(lamina[t]));
                if (ring.depth() > tau) total += estmd_detect(ring, tau).sum();
            }
            if (total > best) {
                best = total;
                best_tau = tau;
            }
        }
        CAPTURE(v);
        CHECK(best_tau >= static_cast<std::size_t>(std::ceil(len / (2 * v))));
        CHECK(best_tau <= static_cast<std::size_t>(std::ceil(2 * len / v)));
    }
}

TEST_CASE("DSTMD with a zero ON channel is zero in every direction") {
    std::vector<Grid2D> lamina;
    for (int t = 0; t < 5; ++t) lamina.push_back(testing::random_grid(6, 6, static_cast<std::uint64_t>(t), -1.0, 0.0));
    const DstmdResult r = dstmd_detect(push_lamina(lamina), DstmdConfig{});
    REQUIRE(r.per_direction.size() == 8);
    for (const Grid2D& g : r.per_direction)
        for (float v : g.values()) CHECK(v == 0.0f);
    for (std::uint8_t d : r.preferred.defined) CHECK(d == 0);
}

TEST_CASE("DSTMD with alpha 1 uses the eight neighbours") {
    DstmdConfig cfg;
    cfg.alpha_sep = 1.0;
    const PixelOffset expected[] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    for (std::size_t d = 0; d < 8; ++d) CHECK(dstmd_offset(cfg, d) == expected[d]);
}

TEST_CASE("DSTMD matches the oracle and is non-negative") {
    DstmdConfig cfg;
    cfg.tau1 = 1;
    cfg.tau3 = 3;
    cfg.delay_tau = 4;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<Grid2D> lamina;
        for (std::uint64_t t = 0; t < 8; ++t) lamina.push_back(testing::random_grid(6, 6, seed * 11 + t));
        const DstmdResult r = dstmd_detect(push_lamina(lamina), cfg);
        const oracle::Frames lam = widen(lamina);
        for (std::size_t d = 0; d < 8; ++d) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(d) / 8.0;
            CHECK(oracle::max_rel_error(r.per_direction[d], oracle::dstmd(lam, theta, 2.0, 1, 3, 4)) < 1e-4);
            for (float v : r.per_direction[d].values()) CHECK(v >= 0.0f);
        }
        for (std::size_t i = 0; i < 36; ++i) {
            float best = 0.0f;
            for (const Grid2D& g : r.per_direction) best = std::max(best, g.values()[i]);
            CHECK(r.preferred.magnitude.values()[i] == best);
            CHECK((r.preferred.defined[i] != 0) == (best > 0.0f));
        }
    }
}

TEST_CASE("DSTMD prefers 0 degrees for a target moving right") {
    SynthConfig sc;
    sc.width = 64;
    sc.height = 32;
    sc.frames = 30;
    sc.bg_contrast = 0.0;
    sc.bg_velocity = {0.0, 0.0};
    sc.target_path = LinearPath{{1.0, 0.0}, std::nullopt};
    const Sequence seq = generate_sequence(sc);
    // Matched delay: the leading edge reaches z + alpha (l - alpha) / v frames
    // before the trailing edge leaves z.
    PipelineConfig pc;
    pc.dstmd.tau3 = 3;
    pc.dstmd.delay_tau = 3;
    auto det = make_detector(DetectorKind::dstmd, pc);
    std::size_t checked = 0;
    for (std::size_t n = 0; n < seq.frames.size(); ++n) {
        DetectorOutput out = det->step(seq.frames[n]);
        if (n < det->warmup_frames()) continue;
        auto vals = out.response.values();
        const auto peak = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
        if (vals[peak] <= 0.0f) continue;
        REQUIRE(out.directions);
        CHECK(out.directions->angle.values()[peak] == 0.0f);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("correlation counts per frame") {
    const Grid2D frame(12, 20, 0.5f);
    PipelineConfig pc;
    auto dstmd = make_detector(DetectorKind::dstmd, pc);
    auto estmd = make_detector(DetectorKind::estmd, pc);
    for (int i = 0; i < 10; ++i) {
        dstmd->step(frame);
        estmd->step(frame);
    }
    CHECK(dstmd->last_ops().at(ops::directional_correlations) == 8u * 12u * 20u);
    CHECK(estmd->last_ops().at(ops::estmd_correlations) == 12u * 20u);
}

TEST_CASE("detector registry") {
    for (const std::string& name : detector_names()) {
        const DetectorKind k = parse_detector_kind(name);
        CHECK(to_string(k) == name);
        auto det = make_detector(k, PipelineConfig{});
        CHECK(det->name() == name);
    }
    CHECK_THROWS_AS(parse_detector_kind("nope"), ConfigError);
}

TEST_CASE("warm-up frames are zero and counted") {
    PipelineConfig pc;
    for (const std::string& name : detector_names()) {
        auto det = make_detector(parse_detector_kind(name), pc);
        for (std::size_t n = 0; n < det->warmup_frames(); ++n) {
            const DetectorOutput out = det->step(testing::random_grid(8, 8, n, 0.0, 1.0));
            CHECK(out.response.max_value() == 0.0f);
            CHECK(out.response.sum() == 0.0);
        }
        CHECK_NOTHROW(det->step(testing::random_grid(8, 8, 99, 0.0, 1.0)));
    }
    CHECK(make_detector(DetectorKind::estmd, pc)->warmup_frames() == 1 + 4);
    CHECK(make_detector(DetectorKind::dstmd, pc)->warmup_frames() == 1 + 4);
    CHECK(make_detector(DetectorKind::hr, pc)->warmup_frames() == 1);
}

}  // TEST_SUITE
