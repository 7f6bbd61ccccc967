#pragma once

// Straight per-pixel transliterations of the detector equations in 64-bit
// arithmetic. Histories are oldest first; the output is for the last frame.

#include <cmath>
#include <numbers>
#include <vector>

#include "stmd/grid.hpp"

namespace oracle {

using Frames = std::vector<stmd::Grid2Dd>;

inline double sample(const stmd::Grid2Dd& g, long r, long c) {
    if (r < 0 || c < 0 || r >= static_cast<long>(g.height()) || c >= static_cast<long>(g.width())) return 0.0;
    return g.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

inline const stmd::Grid2Dd& back(const Frames& f, std::size_t delay) { return f[f.size() - 1 - delay]; }

// O = I(z + off, t - tau) * I(z, t)
inline stmd::Grid2Dd hr(const Frames& f, std::size_t tau, int dx, int dy) {
    const auto& now = back(f, 0);
    const auto& past = back(f, tau);
    stmd::Grid2Dd out(now.height(), now.width());
    for (long r = 0; r < static_cast<long>(now.height()); ++r)
        for (long c = 0; c < static_cast<long>(now.width()); ++c)
            out.at(r, c) = sample(past, r + dy, c + dx) * now.at(r, c);
    return out;
}

// O = I(z, t) / (I(z + off, t - tau) + guard)
inline stmd::Grid2Dd bl(const Frames& f, std::size_t tau, int dx, int dy, double guard) {
    const auto& now = back(f, 0);
    const auto& past = back(f, tau);
    stmd::Grid2Dd out(now.height(), now.width());
    for (long r = 0; r < static_cast<long>(now.height()); ++r)
        for (long c = 0; c < static_cast<long>(now.width()); ++c)
            out.at(r, c) = now.at(r, c) / (sample(past, r + dy, c + dx) + guard);
    return out;
}

// O = I(z', t - tau1) I(z, t) / (I(z'', t - tau2) + guard)
inline stmd::Grid2Dd hrbl(const Frames& f, std::size_t tau1, int dx1, int dy1, std::size_t tau2, int dx2, int dy2,
                          double guard) {
    const auto& now = back(f, 0);
    stmd::Grid2Dd out(now.height(), now.width());
    for (long r = 0; r < static_cast<long>(now.height()); ++r)
        for (long c = 0; c < static_cast<long>(now.width()); ++c)
            out.at(r, c) = sample(back(f, tau1), r + dy1, c + dx1) * now.at(r, c) /
                           (sample(back(f, tau2), r + dy2, c + dx2) + guard);
    return out;
}

// ON/OFF split of a lamina output.
inline double on(double x) { return x > 0.0 ? x : 0.0; }
inline double off(double x) { return x < 0.0 ? -x : 0.0; }

// Lamina outputs (oldest first) from raw lamina grids: O = ON(z,t) OFF(z,t-tau)
inline stmd::Grid2Dd estmd(const Frames& lamina, std::size_t tau) {
    const auto& now = back(lamina, 0);
    const auto& past = back(lamina, tau);
    stmd::Grid2Dd out(now.height(), now.width());
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = on(now.values()[i]) * off(past.values()[i]);
    return out;
}

// O(theta) = ON(z,t) OFF(z',t-tau3) [ON(z,t-tau1) + OFF(z',t-tau)]
inline stmd::Grid2Dd dstmd(const Frames& lamina, double theta, double alpha, std::size_t tau1, std::size_t tau3,
                           std::size_t tau) {
    const int dx = static_cast<int>(std::lround(alpha * std::cos(theta)));
    const int dy = static_cast<int>(std::lround(alpha * std::sin(theta)));
    const auto& now = back(lamina, 0);
    stmd::Grid2Dd out(now.height(), now.width());
    for (long r = 0; r < static_cast<long>(now.height()); ++r) {
        for (long c = 0; c < static_cast<long>(now.width()); ++c) {
            const bool inside = r + dy >= 0 && c + dx >= 0 && r + dy < static_cast<long>(now.height()) &&
                                c + dx < static_cast<long>(now.width());
            const double off3 = inside ? off(sample(back(lamina, tau3), r + dy, c + dx)) : 0.0;
            const double offt = inside ? off(sample(back(lamina, tau), r + dy, c + dx)) : 0.0;
            out.at(r, c) = on(now.at(r, c)) * off3 * (on(back(lamina, tau1).at(r, c)) + offt);
        }
    }
    return out;
}

// Worst |a - b| / max(|b|, floor) over the grid.
template <class A>
double max_rel_error(const stmd::BasicGrid<A>& got, const stmd::Grid2Dd& want, double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        const double g = static_cast<double>(got.values()[i]);
        const double w = want.values()[i];
        worst = std::max(worst, std::abs(g - w) / std::max(std::abs(w), floor));
    }
    return worst;
}

}  // namespace oracle
