#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stmd/detector.hpp"
#include "stmd/direction.hpp"
#include "stmd/grid.hpp"
#include "stmd/synthgen.hpp"

namespace stmd {

struct Detection {
    std::size_t frame_index = 0;
    double x = 0.0;  // column
    double y = 0.0;  // row
    double score = 0.0;
    std::optional<double> direction;  // radians
};

struct MatchingConfig {
    double match_radius = 5.0;
    double nms_radius = 5.0;
    std::size_t threshold_count = 50;
    double fppi_max = 5.0;
    std::size_t max_per_frame = 100;  // 0 keeps every peak

    void validate() const;
};

// Local maxima (8-neighbourhood) with score >= threshold and > 0, greedy
// NMS by descending score, ties broken by row-major position.
std::vector<Detection> extract_detections(const Grid2D& response, double threshold, const MatchingConfig& cfg,
                                          std::size_t frame_index = 0, const DirectionField* directions = nullptr);

struct MatchCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    // Index into the detection list of the true positive, if any.
    std::optional<std::size_t> matched;
};

// Single-target matching: the closest detection within match_radius is the
// true positive, everything else is a false positive.
MatchCounts match_frame(const std::vector<Detection>& dets, const TrackPoint& truth, const MatchingConfig& cfg);

struct ThresholdCounts {
    double threshold = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t frames = 0;
};

struct CurvePoint {
    double fppi = 0.0;
    double recall = 0.0;
};

struct AucResult {
    std::vector<CurvePoint> curve;
    double auc = 0.0;
};

// Trapezoidal area under recall(fppi) on [0, fppi_max] divided by
// fppi_max; recall is 0 left of the first point and flat right of the last.
AucResult recall_fppi_auc(const std::vector<ThresholdCounts>& counts, double fppi_max);

// Step sum of (R_i - R_{i-1}) P_i over detections sorted by score.
double average_precision(std::vector<std::pair<double, bool>> scored_labels, std::size_t truth_count);
double average_precision(const std::vector<Detection>& detections, const std::vector<TrackPoint>& truth,
                         const MatchingConfig& cfg);

double f1_at(const ThresholdCounts& c);
double f1_best(const std::vector<ThresholdCounts>& counts);

struct AngularError {
    double mean = 0.0;
    double median = 0.0;
    std::size_t count = 0;
};

// |angle - heading| wrapped into [0, pi].
double wrapped_difference(double a, double b) noexcept;
AngularError angular_error(const std::vector<std::pair<double, double>>& angle_heading);

// Nearest-rank quantiles of the values, deduplicated, ascending.
std::vector<double> quantile_thresholds(std::vector<double> values, std::size_t count);

// Detections grouped per evaluated frame, each group sorted by descending score.
struct FrameDetections {
    TrackPoint truth;
    std::vector<Detection> detections;
    double peak = 0.0;
};

std::vector<ThresholdCounts> sweep_counts(const std::vector<FrameDetections>& frames,
                                          const std::vector<double>& thresholds, const MatchingConfig& cfg);

struct MetricsReport {
    double auc = 0.0;
    double ap = 0.0;
    double f1 = 0.0;
    double best_threshold = 0.0;
    std::optional<double> mean_angular_error;
    std::optional<double> median_angular_error;
    double time_per_frame_ms = 0.0;
    OpCounts op_counts;
    std::vector<CurvePoint> curve;
    std::vector<ThresholdCounts> sweep;
    double fppi_max = 5.0;
    std::size_t frames_evaluated = 0;
    // Sum over evaluated frames of the peak response near the true target.
    double target_response = 0.0;

    // Smallest FPPI at which recall reaches `recall`, if it ever does.
    std::optional<double> fppi_at_recall(double recall) const;
};

// Groups detections by the track's frames, skipping frames < first_frame.
std::vector<FrameDetections> group_by_frame(const std::vector<Detection>& detections,
                                            const std::vector<TrackPoint>& truth, std::size_t first_frame);

MetricsReport evaluate(const std::vector<FrameDetections>& frames, const MatchingConfig& cfg);

struct RunResult {
    std::vector<Detection> detections;
    std::size_t warmup_frames = 0;
    OpCounts steady_ops;  // op counts of the last frame
    double time_per_frame_ms = 0.0;
};

// Called with every post-warm-up output.
using FrameObserver = std::function<void(std::size_t frame_index, const DetectorOutput& out)>;

// Runs the detector over every frame and extracts all NMS peaks.
RunResult run_detector(Detector& detector, const std::vector<Grid2D>& frames, const MatchingConfig& cfg,
                       const FrameObserver& observer = {});

// Largest response within a Chebyshev radius of center (0 if all negative).
double peak_near(const Grid2D& response, const Vec2& center, double radius);

// run_detector + evaluate against the sequence track. target_response uses
// response_radius, defaulting to the match radius.
MetricsReport evaluate_detector(Detector& detector, const Sequence& seq, const MatchingConfig& cfg,
                                std::optional<double> response_radius = std::nullopt);

// Mean wall-clock milliseconds per frame after skipping the first frames.
double timing_run(Detector& detector, const std::vector<Grid2D>& frames, std::size_t skip = 10);

std::string format_report(const MetricsReport& report);
std::string format_curve_csv(const MetricsReport& report);

}  // namespace stmd
