#include "stmd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stmd/errors.hpp"

namespace stmd {

void MatchingConfig::validate() const {
    if (!(match_radius >= 1.0) || !(nms_radius >= 1.0)) throw ConfigError("matching radii must be >= 1");
    if (threshold_count < 1) throw ConfigError("matching.threshold_count must be >= 1");
    if (!(fppi_max > 0.0)) throw ConfigError("matching.fppi_max must be > 0");
}

std::vector<Detection> extract_detections(const Grid2D& response, double threshold, const MatchingConfig& cfg,
                                          std::size_t frame_index, const DirectionField* directions) {
    const long h = static_cast<long>(response.height());
    const long w = static_cast<long>(response.width());
    struct Peak {
        float score;
        long index;
    };
    std::vector<Peak> peaks;
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            const float v = response.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (!(v > 0.0f) || static_cast<double>(v) < threshold) continue;
            bool is_max = true;
            for (long dr = -1; dr <= 1 && is_max; ++dr) {
                for (long dc = -1; dc <= 1; ++dc) {
                    if ((dr != 0 || dc != 0) && response.at_or_zero(r + dr, c + dc) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.push_back({v, r * w + c});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        return a.score != b.score ? a.score > b.score : a.index < b.index;
    });

    const long rad = static_cast<long>(std::floor(cfg.nms_radius));
    const double rad2 = cfg.nms_radius * cfg.nms_radius;
    std::vector<std::uint8_t> suppressed(response.size(), 0);
    std::vector<Detection> out;
    for (const Peak& p : peaks) {
        if (suppressed[static_cast<std::size_t>(p.index)]) continue;
        const long r = p.index / w;
        const long c = p.index % w;
        Detection d;
        d.frame_index = frame_index;
        d.x = static_cast<double>(c);
        d.y = static_cast<double>(r);
        d.score = p.score;
        if (directions && directions->is_defined(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) {
            d.direction = directions->angle.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
        out.push_back(d);
        if (cfg.max_per_frame != 0 && out.size() >= cfg.max_per_frame) break;
        for (long dr = -rad; dr <= rad; ++dr) {
            for (long dc = -rad; dc <= rad; ++dc) {
                const long rr = r + dr;
                const long cc = c + dc;
                if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
                if (static_cast<double>(dr * dr + dc * dc) <= rad2) suppressed[static_cast<std::size_t>(rr * w + cc)] = 1;
            }
        }
    }
    return out;
}

MatchCounts match_frame(const std::vector<Detection>& dets, const TrackPoint& truth, const MatchingConfig& cfg) {
    MatchCounts m;
    double best = cfg.match_radius;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        const double dist = std::hypot(dets[i].x - truth.center.x, dets[i].y - truth.center.y);
        if (dist <= best && (!m.matched || dist < best)) {
            best = dist;
            m.matched = i;
        }
    }
    m.tp = m.matched ? 1 : 0;
    m.fn = 1 - m.tp;
    m.fp = dets.size() - m.tp;
    return m;
}

AucResult recall_fppi_auc(const std::vector<ThresholdCounts>& counts, double fppi_max) {
    if (counts.empty()) throw Error("recall_fppi_auc: empty threshold sweep");
    if (!(fppi_max > 0.0)) throw ParameterError("recall_fppi_auc: fppi_max must be > 0");
    AucResult res;
    for (const ThresholdCounts& c : counts) {
        const double positives = static_cast<double>(c.tp + c.fn);
        CurvePoint p;
        p.recall = positives > 0.0 ? static_cast<double>(c.tp) / positives : 0.0;
        p.fppi = c.frames > 0 ? static_cast<double>(c.fp) / static_cast<double>(c.frames) : 0.0;
        res.curve.push_back(p);
    }
    std::sort(res.curve.begin(), res.curve.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.fppi != b.fppi ? a.fppi < b.fppi : a.recall < b.recall;
    });

    double area = 0.0;
    for (std::size_t i = 0; i + 1 < res.curve.size(); ++i) {
        const CurvePoint& a = res.curve[i];
        const CurvePoint& b = res.curve[i + 1];
        if (a.fppi >= fppi_max) break;
        if (b.fppi > fppi_max) {
            const double t = (fppi_max - a.fppi) / (b.fppi - a.fppi);
            const double r_end = a.recall + t * (b.recall - a.recall);
            area += 0.5 * (a.recall + r_end) * (fppi_max - a.fppi);
            res.auc = area / fppi_max;
            return res;
        }
        area += 0.5 * (a.recall + b.recall) * (b.fppi - a.fppi);
    }
    const CurvePoint& last = res.curve.back();
    if (last.fppi < fppi_max) area += last.recall * (fppi_max - last.fppi);
    res.auc = area / fppi_max;
    return res;
}

double average_precision(std::vector<std::pair<double, bool>> scored_labels, std::size_t truth_count) {
    if (truth_count == 0) throw Error("average_precision: no ground-truth instances");
    std::stable_sort(scored_labels.begin(), scored_labels.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    double ap = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < scored_labels.size(); ++i) {
        if (scored_labels[i].second) ++tp;
        const double recall = static_cast<double>(tp) / static_cast<double>(truth_count);
        const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

double average_precision(const std::vector<Detection>& detections, const std::vector<TrackPoint>& truth,
                         const MatchingConfig& cfg) {
    const auto frames = group_by_frame(detections, truth, 0);
    std::vector<std::pair<double, bool>> labels;
    for (const FrameDetections& f : frames) {
        const MatchCounts m = match_frame(f.detections, f.truth, cfg);
        for (std::size_t i = 0; i < f.detections.size(); ++i) {
            labels.emplace_back(f.detections[i].score, m.matched && *m.matched == i);
        }
    }
    return average_precision(std::move(labels), truth.size());
}

double f1_at(const ThresholdCounts& c) {
    const double dets = static_cast<double>(c.tp + c.fp);
    const double positives = static_cast<double>(c.tp + c.fn);
    const double p = dets > 0.0 ? static_cast<double>(c.tp) / dets : 0.0;
    const double r = positives > 0.0 ? static_cast<double>(c.tp) / positives : 0.0;
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double f1_best(const std::vector<ThresholdCounts>& counts) {
    double best = 0.0;
    for (const ThresholdCounts& c : counts) best = std::max(best, f1_at(c));
    return best;
}

double wrapped_difference(double a, double b) noexcept {
    const double d = std::fabs(std::remainder(a - b, 2.0 * std::numbers::pi));
    return std::min(d, std::numbers::pi);
}

AngularError angular_error(const std::vector<std::pair<double, double>>& angle_heading) {
    if (angle_heading.empty()) throw Error("angular_error: no directed true positives");
    std::vector<double> errs;
    errs.reserve(angle_heading.size());
    double sum = 0.0;
    for (const auto& [angle, heading] : angle_heading) {
        errs.push_back(wrapped_difference(angle, heading));
        sum += errs.back();
    }
    std::sort(errs.begin(), errs.end());
    AngularError e;
    e.count = errs.size();
    e.mean = sum / static_cast<double>(errs.size());
    const std::size_t mid = errs.size() / 2;
    e.median = errs.size() % 2 == 1 ? errs[mid] : 0.5 * (errs[mid - 1] + errs[mid]);
    return e;
}

std::vector<double> quantile_thresholds(std::vector<double> values, std::size_t count) {
    if (values.empty() || count == 0) return {};
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    const double last = static_cast<double>(values.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double q = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out.push_back(values[static_cast<std::size_t>(std::lround(q * last))]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ThresholdCounts> sweep_counts(const std::vector<FrameDetections>& frames,
                                          const std::vector<double>& thresholds, const MatchingConfig& cfg) {
    std::vector<ThresholdCounts> sweep;
    std::vector<Detection> kept;
    for (double t : thresholds) {
        ThresholdCounts c;
        c.threshold = t;
        c.frames = frames.size();
        for (const FrameDetections& f : frames) {
            kept.clear();
            for (const Detection& d : f.detections) {
                if (d.score < t) break;
                kept.push_back(d);
            }
            const MatchCounts m = match_frame(kept, f.truth, cfg);
            c.tp += m.tp;
            c.fp += m.fp;
            c.fn += m.fn;
        }
        sweep.push_back(c);
    }
    return sweep;
}

std::optional<double> MetricsReport::fppi_at_recall(double recall) const {
    for (const CurvePoint& p : curve) {
        if (p.recall >= recall) return p.fppi;
    }
    return std::nullopt;
}

std::vector<FrameDetections> group_by_frame(const std::vector<Detection>& detections,
                                            const std::vector<TrackPoint>& truth, std::size_t first_frame) {
    std::vector<FrameDetections> frames;
    std::vector<std::size_t> slot(truth.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].frame_index < first_frame) continue;
        slot[i] = frames.size();
        frames.push_back({truth[i], {}, 0.0});
    }
    for (const Detection& d : detections) {
        if (d.frame_index >= truth.size() || slot[d.frame_index] == static_cast<std::size_t>(-1)) continue;
        FrameDetections& f = frames[slot[d.frame_index]];
        f.detections.push_back(d);
        f.peak = std::max(f.peak, d.score);
    }
    for (FrameDetections& f : frames) {
        std::stable_sort(f.detections.begin(), f.detections.end(),
                         [](const Detection& a, const Detection& b) { return a.score > b.score; });
    }
    return frames;
}

MetricsReport evaluate(const std::vector<FrameDetections>& frames, const MatchingConfig& cfg) {
    cfg.validate();
    if (frames.empty()) throw Error("evaluate: no frames to evaluate");
    MetricsReport report;
    report.fppi_max = cfg.fppi_max;
    report.frames_evaluated = frames.size();

    std::vector<double> peaks;
    peaks.reserve(frames.size());
    for (const FrameDetections& f : frames) peaks.push_back(f.peak);
    report.sweep = sweep_counts(frames, quantile_thresholds(peaks, cfg.threshold_count), cfg);

    AucResult auc = recall_fppi_auc(report.sweep, cfg.fppi_max);
    report.auc = auc.auc;
    report.curve = std::move(auc.curve);

    std::size_t best_index = 0;
    for (std::size_t i = 0; i < report.sweep.size(); ++i) {
        const double f1 = f1_at(report.sweep[i]);
        if (f1 > report.f1) {
            report.f1 = f1;
            best_index = i;
        }
    }
    report.best_threshold = report.sweep[best_index].threshold;

    std::vector<std::pair<double, bool>> labels;
    std::vector<std::pair<double, double>> directed;
    std::vector<Detection> kept;
    for (const FrameDetections& f : frames) {
        const MatchCounts all = match_frame(f.detections, f.truth, cfg);
        for (std::size_t i = 0; i < f.detections.size(); ++i) {
            labels.emplace_back(f.detections[i].score, all.matched && *all.matched == i);
        }
        kept.clear();
        for (const Detection& d : f.detections) {
            if (d.score < report.best_threshold) break;
            kept.push_back(d);
        }
        const MatchCounts best = match_frame(kept, f.truth, cfg);
        if (report.f1 > 0.0 && best.matched && kept[*best.matched].direction) {
            directed.emplace_back(*kept[*best.matched].direction, f.truth.heading);
        }
    }
    report.ap = average_precision(std::move(labels), frames.size());
    if (!directed.empty()) {
        const AngularError e = angular_error(directed);
        report.mean_angular_error = e.mean;
        report.median_angular_error = e.median;
    }
    return report;
}

RunResult run_detector(Detector& detector, const std::vector<Grid2D>& frames, const MatchingConfig& cfg,
                       const FrameObserver& observer) {
    RunResult result;
    result.warmup_frames = detector.warmup_frames();
    double total_ms = 0.0;
    std::size_t timed = 0;
    for (std::size_t n = 0; n < frames.size(); ++n) {
        const auto start = std::chrono::steady_clock::now();
        DetectorOutput out = detector.step(frames[n]);
        const auto stop = std::chrono::steady_clock::now();
        if (n >= result.warmup_frames) {
            total_ms += std::chrono::duration<double, std::milli>(stop - start).count();
            ++timed;
        }
        result.steady_ops = detector.last_ops();
        if (n < result.warmup_frames) continue;
        if (observer) observer(n, out);
        auto dets = extract_detections(out.response, 0.0, cfg, n, out.directions ? &*out.directions : nullptr);
        result.detections.insert(result.detections.end(), dets.begin(), dets.end());
    }
    result.time_per_frame_ms = timed > 0 ? total_ms / static_cast<double>(timed) : 0.0;
    return result;
}

double peak_near(const Grid2D& response, const Vec2& center, double radius) {
    const long reach = static_cast<long>(std::floor(radius));
    const long cr = std::lround(center.y);
    const long cc = std::lround(center.x);
    double best = 0.0;
    for (long r = std::max(0L, cr - reach); r <= std::min<long>(static_cast<long>(response.height()) - 1, cr + reach); ++r) {
        for (long c = std::max(0L, cc - reach); c <= std::min<long>(static_cast<long>(response.width()) - 1, cc + reach);
             ++c) {
            best = std::max(best, static_cast<double>(response.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c))));
        }
    }
    return best;
}

MetricsReport evaluate_detector(Detector& detector, const Sequence& seq, const MatchingConfig& cfg,
                                std::optional<double> response_radius) {
    const double radius = response_radius.value_or(cfg.match_radius);
    double target_response = 0.0;
    RunResult run = run_detector(detector, seq.frames, cfg, [&](std::size_t n, const DetectorOutput& out) {
        if (n < seq.track.size()) target_response += peak_near(out.response, seq.track[n].center, radius);
    });
    MetricsReport report = evaluate(group_by_frame(run.detections, seq.track, run.warmup_frames), cfg);
    report.target_response = target_response;
    report.time_per_frame_ms = run.time_per_frame_ms;
    report.op_counts = run.steady_ops;
    return report;
}

double timing_run(Detector& detector, const std::vector<Grid2D>& frames, std::size_t skip) {
    if (frames.size() <= skip) throw ParameterError("timing_run: need more frames than the skipped prefix");
    detector.reset();
    double total_ms = 0.0;
    for (std::size_t n = 0; n < frames.size(); ++n) {
        const auto start = std::chrono::steady_clock::now();
        DetectorOutput out = detector.step(frames[n]);
        const auto stop = std::chrono::steady_clock::now();
        if (n >= skip) total_ms += std::chrono::duration<double, std::milli>(stop - start).count();
        if (out.response.empty()) throw Error("timing_run: detector produced an empty response");
    }
    return total_ms / static_cast<double>(frames.size() - skip);
}

std::string format_report(const MetricsReport& report) {
    std::ostringstream os;
    os.precision(10);
    os << "# metrics report\n";
    os << "fppi_max: " << report.fppi_max << "\n";
    os << "frames_evaluated: " << report.frames_evaluated << "\n";
    os << "auc: " << report.auc << "\n";
    os << "ap: " << report.ap << "\n";
    os << "f1: " << report.f1 << "\n";
    os << "best_threshold: " << report.best_threshold << "\n";
    os << "mean_angular_error_rad: ";
    if (report.mean_angular_error) os << *report.mean_angular_error; else os << "null";
    os << "\nmedian_angular_error_rad: ";
    if (report.median_angular_error) os << *report.median_angular_error; else os << "null";
    os << "\ntime_per_frame_ms: " << report.time_per_frame_ms << "\n";
    for (const auto& [stage, count] : report.op_counts) os << "ops." << stage << ": " << count << "\n";
    os << "# curve: fppi recall\n";
    for (const CurvePoint& p : report.curve) os << p.fppi << " " << p.recall << "\n";
    return os.str();
}

std::string format_curve_csv(const MetricsReport& report) {
    std::ostringstream os;
    os.precision(10);
    os << "threshold,tp,fp,fn,frames,recall,fppi,f1\n";
    for (const ThresholdCounts& c : report.sweep) {
        const double pos = static_cast<double>(c.tp + c.fn);
        os << c.threshold << "," << c.tp << "," << c.fp << "," << c.fn << "," << c.frames << ","
           << (pos > 0 ? static_cast<double>(c.tp) / pos : 0.0) << ","
           << (c.frames > 0 ? static_cast<double>(c.fp) / static_cast<double>(c.frames) : 0.0) << "," << f1_at(c)
           << "\n";
    }
    return os.str();
}

}  // namespace stmd
