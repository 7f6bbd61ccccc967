#include "stmd/frontend.hpp"

#include <cmath>
#include <string>

#include "stmd/errors.hpp"

namespace stmd {

void LaminaConfig::validate() const {
    if (!(frac_order > 0.0 && frac_order <= 1.0)) {
        throw ParameterError("lamina frac_order must lie in (0, 1], got " + std::to_string(frac_order));
    }
    if (memory < 2) throw ParameterError("lamina memory must be >= 2");
}

std::vector<double> fractional_weights(double alpha, std::size_t count) {
    std::vector<double> w(count);
    if (count == 0) return w;
    w[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k) {
        double kd = static_cast<double>(k);
        w[k] = w[k - 1] * (kd - 1.0 - alpha) / kd;
    }
    return w;
}

template <class T>
BasicGrid<T> retina_smooth(const BasicGrid<T>& frame, const RetinaConfig& cfg) {
    Kernel1D k = gaussian_kernel(cfg.sigma, cfg.radius);
    return convolve_separable(frame, k, k);
}

template Grid2D retina_smooth(const Grid2D&, const RetinaConfig&);
template Grid2Dd retina_smooth(const Grid2Dd&, const RetinaConfig&);

Lamina::Lamina(const LaminaConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.mode == LaminaMode::plain_diff) {
        weights_ = {1.0, -1.0};
    } else {
        weights_ = fractional_weights(cfg_.frac_order, cfg_.memory);
    }
}

Grid2D Lamina::apply(const FrameRing& history) const {
    if (history.depth() < weights_.size()) {
        throw WarmupError("lamina needs " + std::to_string(weights_.size()) + " frames, have " +
                          std::to_string(history.depth()));
    }
    const Grid2D& newest = history.delayed(0);
    Grid2D out(newest.height(), newest.width());
    auto dst = out.values();
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const float w = static_cast<float>(weights_[k]);
        auto src = history.delayed(k).values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
    }
    return out;
}

Grid2D lamina_filter(const FrameRing& history, const LaminaConfig& cfg) { return Lamina(cfg).apply(history); }

}  // namespace stmd
