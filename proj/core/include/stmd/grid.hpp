#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stmd {

// Row-major H x W scalar field. The pipeline runs on BasicGrid<float>;
// the double instantiation exists for verification at tight tolerances.
template <class T>
class BasicGrid {
public:
    using value_type = T;

    BasicGrid() = default;
    BasicGrid(std::size_t height, std::size_t width, T fill = T(0))
        : height_(height), width_(width), values_(height * width, fill) {}

    // Validates length and finiteness.
    static BasicGrid from_values(std::size_t height, std::size_t width, std::vector<T> values);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    bool same_shape(const BasicGrid& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    T& at(std::size_t row, std::size_t col) noexcept { return values_[row * width_ + col]; }
    T at(std::size_t row, std::size_t col) const noexcept { return values_[row * width_ + col]; }

    // Zero outside the grid.
    T at_or_zero(long row, long col) const noexcept {
        if (row < 0 || col < 0 || row >= static_cast<long>(height_) || col >= static_cast<long>(width_)) {
            return T(0);
        }
        return values_[static_cast<std::size_t>(row) * width_ + static_cast<std::size_t>(col)];
    }

    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }
    T* data() noexcept { return values_.data(); }
    const T* data() const noexcept { return values_.data(); }

    bool all_finite() const noexcept;
    T max_value() const noexcept;
    double sum() const noexcept;

    friend bool operator==(const BasicGrid&, const BasicGrid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> values_;
};

using Grid2D = BasicGrid<float>;
using Grid2Dd = BasicGrid<double>;

template <class To, class From>
BasicGrid<To> grid_cast(const BasicGrid<From>& grid) {
    BasicGrid<To> out(grid.height(), grid.width());
    auto src = grid.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<To>(src[i]);
    return out;
}

struct OnOffSignals {
    Grid2D on;
    Grid2D off;
};

struct Kernel1D {
    std::size_t radius = 0;
    std::vector<double> taps;  // 2 * radius + 1 entries

    static Kernel1D delta() { return Kernel1D{0, {1.0}}; }
    bool well_formed() const noexcept { return taps.size() == 2 * radius + 1; }
};

// Separable convolution, edge-replicated borders. Kernels wider than the
// grid are rejected.
template <class T>
BasicGrid<T> convolve_separable(const BasicGrid<T>& grid, const Kernel1D& kx, const Kernel1D& ky);

// taps proportional to exp(-i^2 / 2 sigma^2) for i in [-radius, radius], unit sum.
Kernel1D gaussian_kernel(double sigma, std::size_t radius);

// ceil(3 sigma), at least 1.
std::size_t gaussian_radius_for(double sigma);

// Isotropic Gaussian blur with gaussian_radius_for(sigma), clipped to the
// grid size. sigma == 0 is the identity.
template <class T>
BasicGrid<T> gaussian_blur(const BasicGrid<T>& grid, double sigma);

OnOffSignals rectify_pair(const Grid2D& grid);

}  // namespace stmd
