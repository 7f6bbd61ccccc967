#include "stmd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stmd/errors.hpp"

namespace stmd {

template <class T>
BasicGrid<T> BasicGrid<T>::from_values(std::size_t height, std::size_t width, std::vector<T> values) {
    if (values.size() != height * width) {
        throw SizingError("grid " + std::to_string(height) + "x" + std::to_string(width) + " needs " +
                          std::to_string(height * width) + " values, got " + std::to_string(values.size()));
    }
    BasicGrid g;
    g.height_ = height;
    g.width_ = width;
    g.values_ = std::move(values);
    if (!g.all_finite()) throw ParameterError("grid values must be finite");
    return g;
}

template <class T>
bool BasicGrid<T>::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](T v) { return std::isfinite(v); });
}

template <class T>
T BasicGrid<T>::max_value() const noexcept {
    if (values_.empty()) return T(0);
    return *std::max_element(values_.begin(), values_.end());
}

template <class T>
double BasicGrid<T>::sum() const noexcept {
    double acc = 0.0;
    for (T v : values_) acc += static_cast<double>(v);
    return acc;
}

template class BasicGrid<float>;
template class BasicGrid<double>;

namespace {

template <class T>
void horizontal_pass(const BasicGrid<T>& in, BasicGrid<T>& out, const std::vector<T>& taps, std::size_t radius) {
    const std::size_t w = in.width();
    std::vector<T> padded(w + 2 * radius);
    for (std::size_t r = 0; r < in.height(); ++r) {
        const T* src = in.data() + r * w;
        std::fill(padded.begin(), padded.begin() + radius, src[0]);
        std::copy(src, src + w, padded.begin() + radius);
        std::fill(padded.begin() + radius + w, padded.end(), src[w - 1]);
        T* dst = out.data() + r * w;
        std::fill(dst, dst + w, T(0));
        for (std::size_t k = 0; k < taps.size(); ++k) {
            const T tap = taps[k];
            const T* p = padded.data() + k;
            for (std::size_t c = 0; c < w; ++c) dst[c] += tap * p[c];
        }
    }
}

template <class T>
void vertical_pass(const BasicGrid<T>& in, BasicGrid<T>& out, const std::vector<T>& taps, std::size_t radius) {
    const std::size_t w = in.width();
    const long h = static_cast<long>(in.height());
    for (long r = 0; r < h; ++r) {
        T* dst = out.data() + static_cast<std::size_t>(r) * w;
        std::fill(dst, dst + w, T(0));
        for (std::size_t k = 0; k < taps.size(); ++k) {
            long src_row = std::clamp(r + static_cast<long>(k) - static_cast<long>(radius), 0L, h - 1);
            const T* src = in.data() + static_cast<std::size_t>(src_row) * w;
            const T tap = taps[k];
            for (std::size_t c = 0; c < w; ++c) dst[c] += tap * src[c];
        }
    }
}

}  // namespace

template <class T>
BasicGrid<T> convolve_separable(const BasicGrid<T>& grid, const Kernel1D& kx, const Kernel1D& ky) {
    if (!kx.well_formed() || !ky.well_formed()) throw SizingError("kernel taps length must be 2*radius+1");
    if (kx.taps.size() > grid.width() || ky.taps.size() > grid.height()) {
        throw SizingError("kernel (" + std::to_string(kx.taps.size()) + "x" + std::to_string(ky.taps.size()) +
                          ") wider than grid (" + std::to_string(grid.width()) + "x" +
                          std::to_string(grid.height()) + ")");
    }
    std::vector<T> tx(kx.taps.begin(), kx.taps.end());
    std::vector<T> ty(ky.taps.begin(), ky.taps.end());
    BasicGrid<T> tmp(grid.height(), grid.width());
    horizontal_pass(grid, tmp, tx, kx.radius);
    BasicGrid<T> out(grid.height(), grid.width());
    vertical_pass(tmp, out, ty, ky.radius);
    return out;
}

template Grid2D convolve_separable(const Grid2D&, const Kernel1D&, const Kernel1D&);
template Grid2Dd convolve_separable(const Grid2Dd&, const Kernel1D&, const Kernel1D&);

Kernel1D gaussian_kernel(double sigma, std::size_t radius) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("gaussian sigma must be > 0");
    if (radius < 1) throw ParameterError("gaussian radius must be >= 1");
    Kernel1D k{radius, std::vector<double>(2 * radius + 1)};
    double total = 0.0;
    for (std::size_t i = 0; i < k.taps.size(); ++i) {
        double x = static_cast<double>(i) - static_cast<double>(radius);
        k.taps[i] = std::exp(-x * x / (2.0 * sigma * sigma));
        total += k.taps[i];
    }
    for (double& t : k.taps) t /= total;
    return k;
}

std::size_t gaussian_radius_for(double sigma) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(3.0 * sigma)));
}

template <class T>
BasicGrid<T> gaussian_blur(const BasicGrid<T>& grid, double sigma) {
    if (sigma == 0.0) return grid;
    std::size_t r = gaussian_radius_for(sigma);
    std::size_t rx = std::min(r, (grid.width() - 1) / 2);
    std::size_t ry = std::min(r, (grid.height() - 1) / 2);
    Kernel1D kx = rx == 0 ? Kernel1D::delta() : gaussian_kernel(sigma, rx);
    Kernel1D ky = ry == 0 ? Kernel1D::delta() : gaussian_kernel(sigma, ry);
    return convolve_separable(grid, kx, ky);
}

template Grid2D gaussian_blur(const Grid2D&, double);
template Grid2Dd gaussian_blur(const Grid2Dd&, double);

OnOffSignals rectify_pair(const Grid2D& grid) {
    OnOffSignals s{Grid2D(grid.height(), grid.width()), Grid2D(grid.height(), grid.width())};
    auto in = grid.values();
    auto on = s.on.values();
    auto off = s.off.values();
    for (std::size_t i = 0; i < in.size(); ++i) {
        on[i] = std::max(in[i], 0.0f);
        off[i] = std::max(-in[i], 0.0f);
    }
    return s;
}

}  // namespace stmd
