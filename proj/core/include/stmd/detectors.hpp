#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "stmd/classical.hpp"
#include "stmd/detector.hpp"
#include "stmd/frontend.hpp"
#include "stmd/stmdnet.hpp"

namespace stmd {

enum class DetectorKind { hr, bl, hrbl, estmd, dstmd, stmdnet, stmdnet_f };

DetectorKind parse_detector_kind(std::string_view name);
std::string to_string(DetectorKind kind);
const std::vector<std::string>& detector_names();

// Every tunable of every detector. Classical detectors use classical_lamina
// (plain differentiation by default), STMDNet uses stmdnet.lamina.
struct PipelineConfig {
    RetinaConfig retina;
    LaminaConfig classical_lamina{LaminaMode::plain_diff, 1.0, 2};
    EmdConfig emd;
    std::size_t estmd_tau = 4;
    DstmdConfig dstmd;
    StmdNetConfig stmdnet;
    FeedbackConfig feedback;
};

// HR, BL or HR/BL on retina-smoothed luminance.
class EmdDetector final : public Detector {
public:
    EmdDetector(DetectorKind kind, const RetinaConfig& retina, const EmdConfig& cfg);

    std::string name() const override { return to_string(kind_); }
    DetectorOutput step(const Grid2D& frame) override;
    std::size_t warmup_frames() const override { return history_.capacity() - 1; }
    bool directional() const override { return false; }
    const OpCounts& last_ops() const override { return ops_; }
    void reset() override;

private:
    DetectorKind kind_;
    RetinaConfig retina_;
    EmdConfig cfg_;
    FrameRing history_;
    std::int64_t frame_index_ = 0;
    OpCounts ops_;
};

// Shared retina -> lamina -> ON/OFF front end for ESTMD and DSTMD.
class OnOffFrontEnd {
public:
    OnOffFrontEnd(const RetinaConfig& retina, const LaminaConfig& lamina, std::size_t max_delay);

    // False while the lamina or the delay line is still filling.
    bool push(const Grid2D& frame);
    const OnOffRing& signals() const noexcept { return on_off_; }
    std::size_t warmup_frames() const noexcept { return lamina_.weights().size() - 1 + on_off_.capacity() - 1; }
    void reset();

private:
    RetinaConfig retina_;
    Lamina lamina_;
    FrameRing retina_history_;
    OnOffRing on_off_;
    std::int64_t frame_index_ = 0;
};

class EstmdDetector final : public Detector {
public:
    EstmdDetector(const RetinaConfig& retina, const LaminaConfig& lamina, std::size_t tau);

    std::string name() const override { return "estmd"; }
    DetectorOutput step(const Grid2D& frame) override;
    std::size_t warmup_frames() const override { return front_.warmup_frames(); }
    bool directional() const override { return false; }
    const OpCounts& last_ops() const override { return ops_; }
    void reset() override { front_.reset(); }

private:
    OnOffFrontEnd front_;
    std::size_t tau_;
    OpCounts ops_;
};

class DstmdDetector final : public Detector {
public:
    DstmdDetector(const RetinaConfig& retina, const LaminaConfig& lamina, const DstmdConfig& cfg);

    std::string name() const override { return "dstmd"; }
    DetectorOutput step(const Grid2D& frame) override;
    std::size_t warmup_frames() const override { return front_.warmup_frames(); }
    bool directional() const override { return true; }
    const OpCounts& last_ops() const override { return ops_; }
    void reset() override { front_.reset(); }

private:
    OnOffFrontEnd front_;
    DstmdConfig cfg_;
    OpCounts ops_;
};

std::unique_ptr<Detector> make_detector(DetectorKind kind, const PipelineConfig& cfg);

}  // namespace stmd
