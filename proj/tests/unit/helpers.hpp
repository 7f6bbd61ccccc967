#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "stmd/grid.hpp"

namespace testing {

template <class T = float>
stmd::BasicGrid<T> random_grid(std::size_t h, std::size_t w, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    stmd::BasicGrid<T> g(h, w);
    for (T& v : g.values()) v = static_cast<T>(u(rng));
    return g;
}

// Direct 2D convolution with the outer-product kernel and replicated borders.
inline stmd::Grid2Dd brute_convolve(const stmd::Grid2Dd& in, const std::vector<double>& kx,
                                    const std::vector<double>& ky) {
    const long rx = static_cast<long>(kx.size() / 2);
    const long ry = static_cast<long>(ky.size() / 2);
    const long h = static_cast<long>(in.height());
    const long w = static_cast<long>(in.width());
    stmd::Grid2Dd out(in.height(), in.width());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (long i = -ry; i <= ry; ++i) {
                for (long j = -rx; j <= rx; ++j) {
                    const long rr = std::clamp(r + i, 0L, h - 1);
                    const long cc = std::clamp(c + j, 0L, w - 1);
                    acc += ky[static_cast<std::size_t>(i + ry)] * kx[static_cast<std::size_t>(j + rx)] *
                           in.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                }
            }
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    }
    return out;
}

template <class A, class B>
double max_abs_diff(const stmd::BasicGrid<A>& a, const stmd::BasicGrid<B>& b) {
    double worst = 0.0;
    auto va = a.values();
    auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(va[i]) - static_cast<double>(vb[i])));
    }
    return worst;
}

}  // namespace testing
