#include "stmd/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stmd/errors.hpp"

namespace stmd {

double wrap_angle(double radians) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(radians, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

const std::vector<std::string>& detector_names() {
    static const std::vector<std::string> names{"hr", "bl", "hrbl", "estmd", "dstmd", "stmdnet", "stmdnet-f"};
    return names;
}

DetectorKind parse_detector_kind(std::string_view name) {
    static const DetectorKind kinds[] = {DetectorKind::hr,    DetectorKind::bl,      DetectorKind::hrbl,
                                         DetectorKind::estmd, DetectorKind::dstmd,   DetectorKind::stmdnet,
                                         DetectorKind::stmdnet_f};
    const auto& names = detector_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return kinds[i];
    }
    throw ConfigError("unknown detector '" + std::string(name) + "'");
}

std::string to_string(DetectorKind kind) { return detector_names()[static_cast<std::size_t>(kind)]; }

namespace {

std::size_t emd_max_delay(DetectorKind kind, const EmdConfig& cfg) {
    return kind == DetectorKind::hrbl ? std::max(cfg.delay_tau, cfg.second_delay) : cfg.delay_tau;
}

}  // namespace

EmdDetector::EmdDetector(DetectorKind kind, const RetinaConfig& retina, const EmdConfig& cfg)
    : kind_(kind), retina_(retina), cfg_(cfg), history_(emd_max_delay(kind, cfg) + 1) {
    if (kind != DetectorKind::hr && kind != DetectorKind::bl && kind != DetectorKind::hrbl) {
        throw ConfigError("EmdDetector supports hr, bl and hrbl only");
    }
    cfg_.validate();
}

void EmdDetector::reset() {
    history_.clear();
    frame_index_ = 0;
}

DetectorOutput EmdDetector::step(const Grid2D& frame) {
    ops_.clear();
    history_.push(frame_index_++, retina_smooth(frame, retina_));
    if (history_.depth() < history_.capacity()) return {Grid2D(frame.height(), frame.width()), std::nullopt};
    ops_[ops::emd_correlations] = frame.size();
    switch (kind_) {
        case DetectorKind::hr:
            return {hr_detect(history_, cfg_), std::nullopt};
        case DetectorKind::bl:
            return {bl_detect(history_, cfg_), std::nullopt};
        default:
            return {hrbl_detect(history_, cfg_), std::nullopt};
    }
}

OnOffFrontEnd::OnOffFrontEnd(const RetinaConfig& retina, const LaminaConfig& lamina, std::size_t max_delay)
    : retina_(retina), lamina_(lamina), retina_history_(lamina_.weights().size()), on_off_(max_delay + 1) {}

bool OnOffFrontEnd::push(const Grid2D& frame) {
    const std::int64_t index = frame_index_++;
    retina_history_.push(index, retina_smooth(frame, retina_));
    if (retina_history_.depth() < lamina_.weights().size()) return false;
    on_off_.push(index, split_on_off(lamina_.apply(retina_history_)));
    return on_off_.depth() == on_off_.capacity();
}

void OnOffFrontEnd::reset() {
    retina_history_.clear();
    on_off_.clear();
    frame_index_ = 0;
}

EstmdDetector::EstmdDetector(const RetinaConfig& retina, const LaminaConfig& lamina, std::size_t tau)
    : front_(retina, lamina, tau), tau_(tau) {
    if (tau < 1) throw ParameterError("ESTMD tau must be >= 1");
}

DetectorOutput EstmdDetector::step(const Grid2D& frame) {
    ops_.clear();
    if (!front_.push(frame)) return {Grid2D(frame.height(), frame.width()), std::nullopt};
    ops_[ops::estmd_correlations] = frame.size();
    return {estmd_detect(front_.signals(), tau_), std::nullopt};
}

DstmdDetector::DstmdDetector(const RetinaConfig& retina, const LaminaConfig& lamina, const DstmdConfig& cfg)
    : front_(retina, lamina, cfg.max_delay()), cfg_(cfg) {
    cfg_.validate();
}

DetectorOutput DstmdDetector::step(const Grid2D& frame) {
    ops_.clear();
    if (!front_.push(frame)) {
        return {Grid2D(frame.height(), frame.width()), DirectionField(frame.height(), frame.width())};
    }
    DstmdResult r = dstmd_detect(front_.signals(), cfg_);
    ops_[ops::directional_correlations] = cfg_.directions * frame.size();
    Grid2D response = r.preferred.magnitude;
    return {std::move(response), std::move(r.preferred)};
}

std::unique_ptr<Detector> make_detector(DetectorKind kind, const PipelineConfig& cfg) {
    switch (kind) {
        case DetectorKind::hr:
        case DetectorKind::bl:
        case DetectorKind::hrbl:
            return std::make_unique<EmdDetector>(kind, cfg.retina, cfg.emd);
        case DetectorKind::estmd:
            return std::make_unique<EstmdDetector>(cfg.retina, cfg.classical_lamina, cfg.estmd_tau);
        case DetectorKind::dstmd:
            return std::make_unique<DstmdDetector>(cfg.retina, cfg.classical_lamina, cfg.dstmd);
        case DetectorKind::stmdnet: {
            StmdNetConfig c = cfg.stmdnet;
            c.retina = cfg.retina;
            c.feedback.reset();
            return std::make_unique<StmdNet>(c);
        }
        case DetectorKind::stmdnet_f: {
            StmdNetConfig c = cfg.stmdnet;
            c.retina = cfg.retina;
            c.feedback = cfg.feedback;
            return std::make_unique<StmdNet>(c);
        }
    }
    throw ConfigError("unhandled detector kind");
}

}  // namespace stmd
