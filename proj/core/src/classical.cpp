#include "stmd/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stmd/errors.hpp"

namespace stmd {

void EmdConfig::validate() const {
    if (delay_tau < 1 || second_delay < 1) throw ParameterError("EMD delays must be >= 1");
    if (!(division_guard > 0.0)) throw ParameterError("EMD division_guard must be > 0");
}

void DstmdConfig::validate() const {
    if (directions < 2) throw ParameterError("DSTMD directions must be >= 2");
    if (!(alpha_sep >= 1.0)) throw ParameterError("DSTMD alpha_sep must be >= 1");
}

std::size_t DstmdConfig::max_delay() const noexcept { return std::max({delay_tau, tau1, tau3}); }

namespace {

void require_depth(std::size_t depth, std::size_t delay, const char* who) {
    if (depth <= delay) {
        throw WarmupError(std::string(who) + " needs history depth > " + std::to_string(delay) + ", have " +
                          std::to_string(depth));
    }
}

// Calls fn(index, row, col) for every pixel.
template <class Fn>
void for_each_pixel(std::size_t height, std::size_t width, Fn&& fn) {
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) fn(r * width + c, static_cast<long>(r), static_cast<long>(c));
    }
}

}  // namespace

Grid2D hr_detect(const FrameRing& history, const EmdConfig& cfg) {
    cfg.validate();
    require_depth(history.depth(), cfg.delay_tau, "HR detector");
    const Grid2D& now = history.delayed(0);
    const Grid2D& past = history.delayed(cfg.delay_tau);
    Grid2D out(now.height(), now.width());
    auto dst = out.values();
    for_each_pixel(now.height(), now.width(), [&](std::size_t i, long r, long c) {
        dst[i] = past.at_or_zero(r + cfg.offset.dy, c + cfg.offset.dx) * now.values()[i];
    });
    return out;
}

Grid2D bl_detect(const FrameRing& history, const EmdConfig& cfg) {
    cfg.validate();
    require_depth(history.depth(), cfg.delay_tau, "BL detector");
    const Grid2D& now = history.delayed(0);
    const Grid2D& past = history.delayed(cfg.delay_tau);
    const float guard = static_cast<float>(cfg.division_guard);
    Grid2D out(now.height(), now.width());
    auto dst = out.values();
    for_each_pixel(now.height(), now.width(), [&](std::size_t i, long r, long c) {
        dst[i] = now.values()[i] / (past.at_or_zero(r + cfg.offset.dy, c + cfg.offset.dx) + guard);
    });
    return out;
}

Grid2D hrbl_detect(const FrameRing& history, const EmdConfig& cfg) {
    cfg.validate();
    require_depth(history.depth(), std::max(cfg.delay_tau, cfg.second_delay), "HR/BL detector");
    const Grid2D& now = history.delayed(0);
    const Grid2D& past1 = history.delayed(cfg.delay_tau);
    const Grid2D& past2 = history.delayed(cfg.second_delay);
    const float guard = static_cast<float>(cfg.division_guard);
    Grid2D out(now.height(), now.width());
    auto dst = out.values();
    for_each_pixel(now.height(), now.width(), [&](std::size_t i, long r, long c) {
        float num = past1.at_or_zero(r + cfg.offset.dy, c + cfg.offset.dx) * now.values()[i];
        float den = past2.at_or_zero(r + cfg.second_offset.dy, c + cfg.second_offset.dx) + guard;
        dst[i] = num / den;
    });
    return out;
}

Grid2D estmd_detect(const OnOffRing& history, std::size_t tau) {
    if (tau < 1) throw ParameterError("ESTMD tau must be >= 1");
    require_depth(history.depth(), tau, "ESTMD");
    const Grid2D& on = history.delayed(0).on;
    const Grid2D& off = history.delayed(tau).off;
    Grid2D out(on.height(), on.width());
    auto dst = out.values();
    auto a = on.values();
    auto b = off.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] * b[i];
    return out;
}

PixelOffset dstmd_offset(const DstmdConfig& cfg, std::size_t direction) {
    double theta = 2.0 * std::numbers::pi * static_cast<double>(direction) / static_cast<double>(cfg.directions);
    return PixelOffset{static_cast<int>(std::lround(cfg.alpha_sep * std::cos(theta))),
                       static_cast<int>(std::lround(cfg.alpha_sep * std::sin(theta)))};
}

DstmdResult dstmd_detect(const OnOffRing& history, const DstmdConfig& cfg) {
    cfg.validate();
    require_depth(history.depth(), cfg.max_delay(), "DSTMD");
    const Grid2D& on_now = history.delayed(0).on;
    const Grid2D& on_tau1 = history.delayed(cfg.tau1).on;
    const Grid2D& off_tau3 = history.delayed(cfg.tau3).off;
    const Grid2D& off_tau = history.delayed(cfg.delay_tau).off;
    const std::size_t h = on_now.height();
    const std::size_t w = on_now.width();

    DstmdResult result;
    result.per_direction.reserve(cfg.directions);
    for (std::size_t d = 0; d < cfg.directions; ++d) {
        const PixelOffset off = dstmd_offset(cfg, d);
        Grid2D out(h, w);
        auto dst = out.values();
        for_each_pixel(h, w, [&](std::size_t i, long r, long c) {
            const long rr = r + off.dy;
            const long cc = c + off.dx;
            dst[i] = on_now.values()[i] * off_tau3.at_or_zero(rr, cc) *
                     (on_tau1.values()[i] + off_tau.at_or_zero(rr, cc));
        });
        result.per_direction.push_back(std::move(out));
    }

    result.preferred = DirectionField(h, w);
    for (std::size_t i = 0; i < h * w; ++i) {
        std::size_t best = 0;
        float best_value = result.per_direction[0].values()[i];
        for (std::size_t d = 1; d < cfg.directions; ++d) {
            float v = result.per_direction[d].values()[i];
            if (v > best_value) {
                best_value = v;
                best = d;
            }
        }
        if (best_value > 0.0f) {
            result.preferred.angle.values()[i] = static_cast<float>(
                2.0 * std::numbers::pi * static_cast<double>(best) / static_cast<double>(cfg.directions));
            result.preferred.magnitude.values()[i] = best_value;
            result.preferred.defined[i] = 1;
        }
    }
    return result;
}

}  // namespace stmd
