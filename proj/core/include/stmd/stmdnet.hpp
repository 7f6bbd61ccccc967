#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "stmd/detector.hpp"
#include "stmd/direction.hpp"
#include "stmd/frontend.hpp"
#include "stmd/grid.hpp"
#include "stmd/ring.hpp"

namespace stmd {

// Membrane potentials of the ON and OFF medulla channels.
struct DualDynamics {
    Grid2D v_on;
    Grid2D v_off;

    static DualDynamics zeros(std::size_t height, std::size_t width) {
        return {Grid2D(height, width), Grid2D(height, width)};
    }
};

struct MedullaConfig {
    double decay_g = 0.5;      // leak conductance, 1/frame
    double inhib_gain = 2.0;   // k, contralateral shunting gain
    double inhib_sigma = 3.0;  // pooling scale of the opposite channel, pixels
    double step_dt = 1.0;
    double excit_gain = 1.0;
    double ceiling = 1e6;

    void validate() const;
};

// Which channel leads a moving target. A dark target on a brighter
// background darkens first (OFF leads); a bright target leads with ON.
enum class TargetPolarity { dark, bright };

struct LdfcConfig {
    double guard_eps = 1e-3;
    double noise_floor = 1e-3;
    std::size_t decode_radius = 1;
    TargetPolarity polarity = TargetPolarity::dark;

    void validate() const;
};

struct FeedbackConfig {
    double fb_gain = 1.0;  // beta
    std::size_t fb_delay = 1;
    double fb_sigma = 5.0;

    void validate() const;
};

// Explicit-Euler leaky integration with ipsilateral excitation and
// contralateral shunting inhibition:
//   v_on += dt (-(g + k blur(S_off)) v_on + e S_on), clamped at 0; same for v_off.
DualDynamics medulla_step(const OnOffSignals& signals, const DualDynamics& state, const MedullaConfig& cfg);

// v_on * v_off, one multiply per pixel.
Grid2D lobula_locate(const DualDynamics& dd);

// 1[v_on + v_off > floor] * v_on / (v_off + eps)
Grid2D ldfc_encode(const DualDynamics& dd, const LdfcConfig& cfg);

// Unit-vector weighted sum of neighbouring LDFC for every pixel with a
// positive locate response, normalized by the neighbourhood LDFC mass.
DirectionField direction_decode(const Grid2D& ldfc, const Grid2D& locate, const LdfcConfig& cfg);

// max(0, raw - beta * blur(history[fb_delay - 1], sigma)). The caller
// pushes the result into the history afterwards.
Grid2D feedback_apply(const Grid2D& raw_locate, const FrameRing& fb_history, const FeedbackConfig& cfg);

struct StmdNetConfig {
    RetinaConfig retina;
    LaminaConfig lamina;
    MedullaConfig medulla;
    LdfcConfig ldfc;
    std::optional<FeedbackConfig> feedback;  // set for the -F variant
};

struct StmdNetOutput {
    Grid2D locate;
    DirectionField directions;
};

// retina -> lamina -> ON/OFF -> medulla -> {lobula locate, LDFC -> decode}.
// The dual dynamics are computed once per frame and feed both branches.
class StmdNet final : public Detector {
public:
    explicit StmdNet(const StmdNetConfig& cfg);

    StmdNetOutput process(const Grid2D& frame);

    std::string name() const override { return cfg_.feedback ? "stmdnet-f" : "stmdnet"; }
    DetectorOutput step(const Grid2D& frame) override;
    std::size_t warmup_frames() const override { return lamina_.weights().size() - 1; }
    bool directional() const override { return true; }
    const OpCounts& last_ops() const override { return ops_; }
    void reset() override;

    const DualDynamics& dynamics() const noexcept { return state_; }
    const StmdNetConfig& config() const noexcept { return cfg_; }

private:
    StmdNetConfig cfg_;
    Lamina lamina_;
    FrameRing retina_history_;
    FrameRing feedback_history_;
    DualDynamics state_;
    std::int64_t frame_index_ = 0;
    OpCounts ops_;
};

}  // namespace stmd
