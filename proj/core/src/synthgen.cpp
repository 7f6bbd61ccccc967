#include "stmd/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stmd/direction.hpp"
#include "stmd/errors.hpp"

namespace stmd {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

double wrap_coord(double v, double period) {
    double r = std::fmod(v, period);
    return r < 0.0 ? r + period : r;
}

// Overlap length of [a0, a1] and [b0, b1].
double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

void SynthConfig::validate() const {
    if (width < 8 || height < 8) throw ConfigError("synth.width and synth.height must be >= 8");
    if (frames < 1) throw ConfigError("synth.frames must be >= 1");
    if (!in_unit(bg_mean_luminance)) throw ConfigError("synth.bg_mean_luminance must lie in [0, 1]");
    if (!in_unit(target_luminance)) throw ConfigError("synth.target_luminance must lie in [0, 1]");
    if (bg_contrast < 0.0 || !in_unit(bg_mean_luminance - bg_contrast) || !in_unit(bg_mean_luminance + bg_contrast)) {
        throw ConfigError("synth.bg_contrast must keep bg_mean_luminance +- contrast inside [0, 1]");
    }
    if (!(stripe_min_width >= 1.0 && stripe_max_width >= stripe_min_width)) {
        throw ConfigError("synth.stripe widths must satisfy 1 <= min <= max");
    }
    if (!(noise_scale >= 2.0)) throw ConfigError("synth.noise_scale must be >= 2");
    if (!(target_size.x > 0.0 && target_size.y > 0.0)) throw ConfigError("synth.target_size must be positive");
    if (target_size.x > static_cast<double>(width) || target_size.y > static_cast<double>(height)) {
        throw ConfigError("synth.target_size exceeds the frame");
    }
    if (const auto* circ = std::get_if<CircularPath>(&target_path)) {
        if (!(circ->radius > 0.0)) throw ConfigError("synth.path.radius must be > 0");
    }
}

BackgroundPanorama::BackgroundPanorama(const SynthConfig& cfg) : cfg_(cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    if (cfg.bg_texture == BackgroundTexture::stripes) {
        tex_width_ = 4 * cfg.width;
        tex_height_ = 1;
        // Stripe boundaries at real positions, then per-column area coverage.
        std::uniform_real_distribution<double> widths(cfg.stripe_min_width, cfg.stripe_max_width);
        std::vector<std::pair<double, double>> stripes;  // (end position, luminance)
        double pos = 0.0;
        const double period = static_cast<double>(tex_width_);
        while (pos < period) {
            pos = std::min(period, pos + widths(rng));
            stripes.emplace_back(pos, cfg.bg_mean_luminance + cfg.bg_contrast * unit(rng));
        }
        texture_.assign(tex_width_, 0.0);
        std::size_t s = 0;
        double begin = 0.0;
        for (std::size_t x = 0; x < tex_width_; ++x) {
            const double x0 = static_cast<double>(x);
            const double x1 = x0 + 1.0;
            double acc = 0.0;
            while (s < stripes.size()) {
                acc += overlap(x0, x1, begin, stripes[s].first) * stripes[s].second;
                if (stripes[s].first >= x1) break;
                begin = stripes[s].first;
                ++s;
            }
            texture_[x] = acc;
        }
        return;
    }

    const auto spacing0 = static_cast<std::size_t>(cfg.noise_scale);
    tex_width_ = ((4 * cfg.width + spacing0 - 1) / spacing0) * spacing0;
    tex_height_ = ((2 * cfg.height + spacing0 - 1) / spacing0) * spacing0;
    texture_.assign(tex_width_ * tex_height_, 0.0);
    double amplitude = 1.0;
    for (std::size_t spacing = spacing0; spacing >= 2; spacing /= 2, amplitude *= 0.5) {
        const std::size_t lw = tex_width_ / spacing;
        const std::size_t lh = tex_height_ / spacing;
        std::vector<double> lattice(lw * lh);
        for (double& v : lattice) v = unit(rng);
        for (std::size_t y = 0; y < tex_height_; ++y) {
            const double fy = static_cast<double>(y) / static_cast<double>(spacing);
            const auto y0 = static_cast<std::size_t>(fy);
            const double ty = fy - static_cast<double>(y0);
            const std::size_t ya = y0 % lh;
            const std::size_t yb = (y0 + 1) % lh;
            for (std::size_t x = 0; x < tex_width_; ++x) {
                const double fx = static_cast<double>(x) / static_cast<double>(spacing);
                const auto x0 = static_cast<std::size_t>(fx);
                const double tx = fx - static_cast<double>(x0);
                const std::size_t xa = x0 % lw;
                const std::size_t xb = (x0 + 1) % lw;
                const double top = lattice[ya * lw + xa] * (1 - tx) + lattice[ya * lw + xb] * tx;
                const double bottom = lattice[yb * lw + xa] * (1 - tx) + lattice[yb * lw + xb] * tx;
                texture_[y * tex_width_ + x] += amplitude * (top * (1 - ty) + bottom * ty);
            }
        }
        if (spacing == 2) break;
    }
    const auto [lo, hi] = std::minmax_element(texture_.begin(), texture_.end());
    const double mid = 0.5 * (*lo + *hi);
    const double half = std::max(1e-12, 0.5 * (*hi - *lo));
    for (double& v : texture_) v = cfg.bg_mean_luminance + cfg.bg_contrast * (v - mid) / half;
}

double BackgroundPanorama::sample(double row, double col, std::size_t frame) const {
    const double n = static_cast<double>(frame);
    const double tw = static_cast<double>(tex_width_);
    const double x = wrap_coord(col - cfg_.bg_velocity.x * n, tw);
    const auto xa = static_cast<std::size_t>(x) % tex_width_;
    const std::size_t xb = (xa + 1) % tex_width_;
    const double tx = x - std::floor(x);
    if (tex_height_ == 1) return texture_[xa] * (1.0 - tx) + texture_[xb] * tx;

    const double y = wrap_coord(row - cfg_.bg_velocity.y * n, static_cast<double>(tex_height_));
    const auto ya = static_cast<std::size_t>(y) % tex_height_;
    const std::size_t yb = (ya + 1) % tex_height_;
    const double ty = y - std::floor(y);
    const double top = texture_[ya * tex_width_ + xa] * (1 - tx) + texture_[ya * tex_width_ + xb] * tx;
    const double bottom = texture_[yb * tex_width_ + xa] * (1 - tx) + texture_[yb * tex_width_ + xb] * tx;
    return top * (1 - ty) + bottom * ty;
}

std::vector<TrackPoint> compute_track(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<TrackPoint> track(cfg.frames);
    const double w = static_cast<double>(cfg.width);
    const double h = static_cast<double>(cfg.height);
    for (std::size_t n = 0; n < cfg.frames; ++n) {
        TrackPoint& p = track[n];
        p.frame_index = n;
        const double nd = static_cast<double>(n);
        if (const auto* lin = std::get_if<LinearPath>(&cfg.target_path)) {
            const double span = static_cast<double>(cfg.frames - 1);
            const Vec2 start = lin->start.value_or(
                Vec2{(w - 1.0) / 2.0 - lin->velocity.x * span / 2.0, (h - 1.0) / 2.0 - lin->velocity.y * span / 2.0});
            p.center = {start.x + lin->velocity.x * nd, start.y + lin->velocity.y * nd};
            p.velocity = lin->velocity;
            p.heading = wrap_angle(std::atan2(lin->velocity.y, lin->velocity.x));
        } else {
            const auto& circ = std::get<CircularPath>(cfg.target_path);
            const double phi = circ.phase + circ.angular_speed * nd;
            p.center = {circ.center.x + circ.radius * std::cos(phi), circ.center.y + circ.radius * std::sin(phi)};
            p.velocity = {-circ.radius * circ.angular_speed * std::sin(phi),
                          circ.radius * circ.angular_speed * std::cos(phi)};
            p.heading = wrap_angle(phi + (circ.angular_speed >= 0.0 ? 0.5 : -0.5) * std::numbers::pi);
        }
        const double hx = cfg.target_size.x / 2.0;
        const double hy = cfg.target_size.y / 2.0;
        if (p.center.x - hx < -0.5 || p.center.x + hx > w - 0.5 || p.center.y - hy < -0.5 ||
            p.center.y + hy > h - 0.5) {
            throw ConfigError("synth.path: target leaves the frame at frame " + std::to_string(n) + " (center " +
                              std::to_string(p.center.x) + ", " + std::to_string(p.center.y) + ")");
        }
    }
    return track;
}

Grid2D render_frame(const SynthConfig& cfg, const BackgroundPanorama& background, const TrackPoint& point) {
    Grid2D frame(cfg.height, cfg.width);
    for (std::size_t r = 0; r < cfg.height; ++r) {
        for (std::size_t c = 0; c < cfg.width; ++c) {
            frame.at(r, c) = static_cast<float>(
                background.sample(static_cast<double>(r), static_cast<double>(c), point.frame_index));
        }
    }
    const double x0 = point.center.x - cfg.target_size.x / 2.0;
    const double x1 = point.center.x + cfg.target_size.x / 2.0;
    const double y0 = point.center.y - cfg.target_size.y / 2.0;
    const double y1 = point.center.y + cfg.target_size.y / 2.0;
    const auto c_lo = static_cast<std::size_t>(std::max(0.0, std::floor(x0 + 0.5)));
    const auto c_hi = std::min(cfg.width - 1, static_cast<std::size_t>(std::max(0.0, std::floor(x1 + 0.5))));
    const auto r_lo = static_cast<std::size_t>(std::max(0.0, std::floor(y0 + 0.5)));
    const auto r_hi = std::min(cfg.height - 1, static_cast<std::size_t>(std::max(0.0, std::floor(y1 + 0.5))));
    for (std::size_t r = r_lo; r <= r_hi; ++r) {
        const double rd = static_cast<double>(r);
        const double cov_y = overlap(rd - 0.5, rd + 0.5, y0, y1);
        for (std::size_t c = c_lo; c <= c_hi; ++c) {
            const double cd = static_cast<double>(c);
            const double cov = cov_y * overlap(cd - 0.5, cd + 0.5, x0, x1);
            if (cov <= 0.0) continue;
            const double bg = static_cast<double>(frame.at(r, c));
            frame.at(r, c) = static_cast<float>(bg + cov * (cfg.target_luminance - bg));
        }
    }
    return frame;
}

Sequence generate_sequence(const SynthConfig& cfg) {
    Sequence seq;
    seq.track = compute_track(cfg);
    seq.rate_hz = cfg.base_rate_hz;
    const BackgroundPanorama background(cfg);
    seq.frames.reserve(cfg.frames);
    for (const TrackPoint& p : seq.track) seq.frames.push_back(render_frame(cfg, background, p));
    return seq;
}

Sequence downsample_rate(const Sequence& seq, std::size_t factor) {
    if (factor < 1) throw ParameterError("downsample factor must be >= 1");
    if (factor > 1 && factor >= seq.frames.size()) {
        throw ParameterError("downsample factor " + std::to_string(factor) + " >= sequence length " +
                             std::to_string(seq.frames.size()));
    }
    Sequence out;
    out.rate_hz = seq.rate_hz / static_cast<double>(factor);
    const std::size_t kept = seq.frames.size() / factor;
    for (std::size_t k = 0; k < kept; ++k) {
        out.frames.push_back(seq.frames[k * factor]);
        if (k * factor < seq.track.size()) {
            TrackPoint p = seq.track[k * factor];
            p.frame_index = k;
            p.velocity = {p.velocity.x * static_cast<double>(factor), p.velocity.y * static_cast<double>(factor)};
            out.track.push_back(p);
        }
    }
    return out;
}

Sequence generate_downsampled(const SynthConfig& cfg, std::size_t factor) {
    if (factor < 1) throw ParameterError("downsample factor must be >= 1");
    if (factor > 1 && factor >= cfg.frames) {
        throw ParameterError("downsample factor " + std::to_string(factor) + " >= sequence length " +
                             std::to_string(cfg.frames));
    }
    const std::vector<TrackPoint> track = compute_track(cfg);
    const BackgroundPanorama background(cfg);
    Sequence out;
    out.rate_hz = cfg.base_rate_hz / static_cast<double>(factor);
    const std::size_t kept = cfg.frames / factor;
    out.frames.reserve(kept);
    for (std::size_t k = 0; k < kept; ++k) {
        out.frames.push_back(render_frame(cfg, background, track[k * factor]));
        TrackPoint p = track[k * factor];
        p.frame_index = k;
        p.velocity = {p.velocity.x * static_cast<double>(factor), p.velocity.y * static_cast<double>(factor)};
        out.track.push_back(p);
    }
    return out;
}

}  // namespace stmd
