#include "stmd/stmdnet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "stmd/errors.hpp"

namespace stmd {

void MedullaConfig::validate() const {
    if (!(decay_g > 0.0)) throw ParameterError("medulla decay_g must be > 0");
    if (!(step_dt > 0.0)) throw ParameterError("medulla step_dt must be > 0");
    if (!(decay_g * step_dt < 1.0)) throw ParameterError("medulla decay_g * step_dt must be < 1 for a stable explicit step");
    if (!(inhib_gain >= 0.0)) throw ParameterError("medulla inhib_gain must be >= 0");
    if (!(inhib_sigma >= 0.0)) throw ParameterError("medulla inhib_sigma must be >= 0");
    if (!(excit_gain > 0.0)) throw ParameterError("medulla excit_gain must be > 0");
    if (!(ceiling > 0.0)) throw ParameterError("medulla ceiling must be > 0");
}

void LdfcConfig::validate() const {
    if (!(guard_eps > 0.0)) throw ParameterError("ldfc guard_eps must be > 0");
    if (!(noise_floor >= 0.0)) throw ParameterError("ldfc noise_floor must be >= 0");
    if (decode_radius < 1) throw ParameterError("ldfc decode_radius must be >= 1");
}

void FeedbackConfig::validate() const {
    if (!(fb_gain >= 0.0 && fb_gain <= 1.0)) throw ParameterError("feedback fb_gain must lie in [0, 1]");
    if (fb_delay < 1) throw ParameterError("feedback fb_delay must be >= 1");
    if (!(fb_sigma >= 0.0)) throw ParameterError("feedback fb_sigma must be >= 0");
}

namespace {

void integrate_channel(Grid2D& v, const Grid2D& excitation, const Grid2D& pooled_opposite, const MedullaConfig& cfg) {
    const float dt = static_cast<float>(cfg.step_dt);
    const float g = static_cast<float>(cfg.decay_g);
    const float k = static_cast<float>(cfg.inhib_gain);
    const float e = static_cast<float>(cfg.excit_gain);
    auto pot = v.values();
    auto drive = excitation.values();
    auto pooled = pooled_opposite.values();
    for (std::size_t i = 0; i < pot.size(); ++i) {
        float next = pot[i] + dt * (-(g + k * pooled[i]) * pot[i] + e * drive[i]);
        pot[i] = next > 0.0f ? next : 0.0f;
    }
}

void check_ceiling(const Grid2D& v, const char* channel, const MedullaConfig& cfg) {
    const float ceiling = static_cast<float>(cfg.ceiling);
    for (float x : v.values()) {
        if (!(x <= ceiling)) {
            std::ostringstream msg;
            msg << "medulla " << channel << " potential " << x << " exceeds ceiling " << cfg.ceiling
                << " (decay_g=" << cfg.decay_g << ", inhib_gain=" << cfg.inhib_gain
                << ", excit_gain=" << cfg.excit_gain << ", step_dt=" << cfg.step_dt << ")";
            throw NumericRunawayError(msg.str());
        }
    }
}

Grid2D guarded_ratio(const Grid2D& numerator, const Grid2D& denominator, const LdfcConfig& cfg) {
    Grid2D out(numerator.height(), numerator.width());
    const float eps = static_cast<float>(cfg.guard_eps);
    const float floor = static_cast<float>(cfg.noise_floor);
    auto a = numerator.values();
    auto b = denominator.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const float ratio = a[i] / (b[i] + eps);
        dst[i] = (a[i] + b[i] > floor) ? ratio : 0.0f;
    }
    return out;
}

struct DecodeTap {
    int dx;
    int dy;
    double ux;
    double uy;
};

std::vector<DecodeTap> decode_taps(std::size_t radius) {
    std::vector<DecodeTap> taps;
    const int r = static_cast<int>(radius);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double len = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
            taps.push_back({dx, dy, dx / len, dy / len});
        }
    }
    return taps;
}

}  // namespace

DualDynamics medulla_step(const OnOffSignals& signals, const DualDynamics& state, const MedullaConfig& cfg) {
    cfg.validate();
    if (!signals.on.same_shape(signals.off) || !signals.on.same_shape(state.v_on) ||
        !state.v_on.same_shape(state.v_off)) {
        throw SizingError("medulla_step: ON/OFF signals and state must share one shape");
    }
    const Grid2D pooled_off = gaussian_blur(signals.off, cfg.inhib_sigma);
    const Grid2D pooled_on = gaussian_blur(signals.on, cfg.inhib_sigma);
    DualDynamics next = state;
    integrate_channel(next.v_on, signals.on, pooled_off, cfg);
    integrate_channel(next.v_off, signals.off, pooled_on, cfg);
    check_ceiling(next.v_on, "ON", cfg);
    check_ceiling(next.v_off, "OFF", cfg);
    return next;
}

Grid2D lobula_locate(const DualDynamics& dd) {
    Grid2D out(dd.v_on.height(), dd.v_on.width());
    auto a = dd.v_on.values();
    auto b = dd.v_off.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] * b[i];
    return out;
}

Grid2D ldfc_encode(const DualDynamics& dd, const LdfcConfig& cfg) {
    cfg.validate();
    return guarded_ratio(dd.v_on, dd.v_off, cfg);
}

DirectionField direction_decode(const Grid2D& ldfc, const Grid2D& locate, const LdfcConfig& cfg) {
    cfg.validate();
    if (!ldfc.same_shape(locate)) throw SizingError("direction_decode: LDFC and locate shapes differ");
    const std::size_t h = ldfc.height();
    const std::size_t w = ldfc.width();
    const auto taps = decode_taps(cfg.decode_radius);
    DirectionField field(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            if (!(locate.at(r, c) > 0.0f)) continue;
            double vx = 0.0;
            double vy = 0.0;
            double mass = 0.0;
            for (const DecodeTap& t : taps) {
                const double v = ldfc.at_or_zero(static_cast<long>(r) + t.dy, static_cast<long>(c) + t.dx);
                vx += v * t.ux;
                vy += v * t.uy;
                mass += v;
            }
            if (mass > cfg.guard_eps) {
                vx /= mass;
                vy /= mass;
            }
            const float magnitude = static_cast<float>(std::hypot(vx, vy));
            if (magnitude > 0.0f) {
                field.angle.at(r, c) = static_cast<float>(wrap_angle(std::atan2(vy, vx)));
                field.magnitude.at(r, c) = magnitude;
                field.defined[r * w + c] = 1;
            }
        }
    }
    return field;
}

Grid2D feedback_apply(const Grid2D& raw_locate, const FrameRing& fb_history, const FeedbackConfig& cfg) {
    cfg.validate();
    if (fb_history.depth() < cfg.fb_delay) return raw_locate;
    const Grid2D pooled = gaussian_blur(fb_history.delayed(cfg.fb_delay - 1), cfg.fb_sigma);
    if (!pooled.same_shape(raw_locate)) throw SizingError("feedback_apply: history shape differs from locate");
    Grid2D out(raw_locate.height(), raw_locate.width());
    const float beta = static_cast<float>(cfg.fb_gain);
    auto raw = raw_locate.values();
    auto fb = pooled.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(0.0f, raw[i] - beta * fb[i]);
    return out;
}

StmdNet::StmdNet(const StmdNetConfig& cfg)
    : cfg_(cfg),
      lamina_(cfg.lamina),
      retina_history_(lamina_.weights().size()),
      feedback_history_(cfg.feedback ? cfg.feedback->fb_delay : 1) {
    cfg_.medulla.validate();
    cfg_.ldfc.validate();
    if (cfg_.feedback) cfg_.feedback->validate();
}

void StmdNet::reset() {
    retina_history_.clear();
    feedback_history_.clear();
    state_ = {};
    frame_index_ = 0;
    ops_.clear();
}

StmdNetOutput StmdNet::process(const Grid2D& frame) {
    ops_.clear();
    const std::size_t h = frame.height();
    const std::size_t w = frame.width();
    if (state_.v_on.empty()) state_ = DualDynamics::zeros(h, w);
    if (!state_.v_on.same_shape(frame)) throw SizingError("stmdnet: frame shape changed mid-sequence");

    retina_history_.push(frame_index_, retina_smooth(frame, cfg_.retina));
    const std::int64_t index = frame_index_++;
    if (retina_history_.depth() < lamina_.weights().size()) {
        return {Grid2D(h, w), DirectionField(h, w)};
    }

    const OnOffSignals signals = split_on_off(lamina_.apply(retina_history_));
    state_ = medulla_step(signals, state_, cfg_.medulla);
    const std::uint64_t pixels = h * w;
    ops_[ops::medulla_updates] = 2 * pixels;

    Grid2D raw = lobula_locate(state_);
    ops_[ops::locate_correlations] = pixels;

    // The leading-edge channel is the numerator so the decoded vector
    // points along the motion.
    const bool off_leads = cfg_.ldfc.polarity == TargetPolarity::dark;
    const Grid2D ldfc = off_leads ? guarded_ratio(state_.v_off, state_.v_on, cfg_.ldfc)
                                  : guarded_ratio(state_.v_on, state_.v_off, cfg_.ldfc);
    ops_[ops::ldfc_divisions] = pixels;
    DirectionField directions = direction_decode(ldfc, raw, cfg_.ldfc);

    if (cfg_.feedback) {
        Grid2D out = feedback_apply(raw, feedback_history_, *cfg_.feedback);
        ops_[ops::feedback_subtractions] = pixels;
        feedback_history_.push(index, out);
        return {std::move(out), std::move(directions)};
    }
    return {std::move(raw), std::move(directions)};
}

DetectorOutput StmdNet::step(const Grid2D& frame) {
    StmdNetOutput out = process(frame);
    return {std::move(out.locate), std::move(out.directions)};
}

}  // namespace stmd
