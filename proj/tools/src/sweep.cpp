#include "stmd/cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "stmd/errors.hpp"

namespace stmd::cli {

namespace {

const std::vector<double>& axis_values(const SweepAxes& axes, const std::string& name) {
    if (name == "velocity") return axes.velocity;
    if (name == "target_size") return axes.target_size;
    if (name == "contrast") return axes.contrast;
    if (name == "rate_factor") return axes.rate_factor;
    if (name == "tau") return axes.tau;
    if (name == "g_L") return axes.g_L;
    if (name == "k") return axes.k;
    return axes.alpha;
}

const std::vector<std::string>& op_columns() {
    static const std::vector<std::string> cols{ops::locate_correlations,      ops::ldfc_divisions,
                                               ops::directional_correlations, ops::estmd_correlations,
                                               ops::emd_correlations,         ops::medulla_updates,
                                               ops::feedback_subtractions};
    return cols;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::size_t positive_int(const std::string& axis, double value) {
    if (!(value >= 1.0) || value != std::floor(value)) {
        throw ConfigError("sweep.axes." + axis + " value " + fmt(value) + " must be a positive integer");
    }
    return static_cast<std::size_t>(value);
}

}  // namespace

const std::vector<std::string>& sweep_axis_names() {
    static const std::vector<std::string> names{"velocity", "target_size", "contrast", "rate_factor",
                                                "tau",      "g_L",         "k",        "alpha"};
    return names;
}

void apply_axis(RunConfig& cfg, const std::string& axis, double value) {
    SynthConfig& s = cfg.synth;
    if (axis == "velocity") {
        if (auto* lin = std::get_if<LinearPath>(&s.target_path)) {
            const double norm = std::hypot(lin->velocity.x, lin->velocity.y);
            const Vec2 dir = norm > 0.0 ? Vec2{lin->velocity.x / norm, lin->velocity.y / norm} : Vec2{1.0, 0.0};
            lin->velocity = {dir.x * value, dir.y * value};
        } else {
            auto& circ = std::get<CircularPath>(s.target_path);
            const double sign = circ.angular_speed < 0.0 ? -1.0 : 1.0;
            circ.angular_speed = sign * value / circ.radius;
        }
    } else if (axis == "target_size") {
        s.target_size = {value, value};
    } else if (axis == "contrast") {
        const bool dark = cfg.pipeline.stmdnet.ldfc.polarity == TargetPolarity::dark;
        s.target_luminance = dark ? s.bg_mean_luminance - value : s.bg_mean_luminance + value;
        if (s.target_luminance < 0.0 || s.target_luminance > 1.0) {
            throw ConfigError("sweep.axes.contrast value " + fmt(value) + " puts the target luminance outside [0, 1]");
        }
    } else if (axis == "rate_factor") {
        cfg.run.rate_factor = positive_int(axis, value);
    } else if (axis == "tau") {
        cfg.pipeline.estmd_tau = positive_int(axis, value);
        cfg.pipeline.dstmd.delay_tau = positive_int(axis, value);
    } else if (axis == "g_L") {
        cfg.pipeline.stmdnet.medulla.decay_g = value;
    } else if (axis == "k") {
        cfg.pipeline.stmdnet.medulla.inhib_gain = value;
    } else if (axis == "alpha") {
        cfg.pipeline.stmdnet.lamina.frac_order = value;
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
}

std::vector<SweepCell> expand_sweep(const RunConfig& cfg) {
    std::vector<std::string> axes;
    for (const std::string& name : sweep_axis_names()) {
        if (!axis_values(cfg.sweep.axes, name).empty()) axes.push_back(name);
    }
    const std::vector<std::uint64_t> seeds =
        cfg.sweep.seeds.empty() ? std::vector<std::uint64_t>{cfg.synth.seed} : cfg.sweep.seeds;

    std::size_t total = seeds.size() * cfg.sweep.detectors.size();
    for (const std::string& a : axes) total *= axis_values(cfg.sweep.axes, a).size();
    if (total > cfg.sweep.cell_budget) {
        const double megapixels = static_cast<double>(total) * static_cast<double>(cfg.synth.frames) *
                                  static_cast<double>(cfg.synth.width * cfg.synth.height) / 1e6;
        throw ConfigError("sweep grid has " + std::to_string(total) + " cells (about " + fmt(megapixels) +
                          " megapixel-frames), over sweep.cell_budget = " + std::to_string(cfg.sweep.cell_budget));
    }

    std::vector<SweepCell> cells;
    cells.reserve(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        RunConfig base = cfg;
        std::vector<std::pair<std::string, double>> params;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const double v = axis_values(cfg.sweep.axes, axes[i])[idx[i]];
            apply_axis(base, axes[i], v);
            params.emplace_back(axes[i], v);
        }
        for (std::uint64_t seed : seeds) {
            for (DetectorKind det : cfg.sweep.detectors) {
                SweepCell cell;
                cell.detector = det;
                cell.seed = seed;
                cell.params = params;
                cell.config = base;
                cell.config.synth.seed = seed;
                cell.config.run.detector = det;
                cell.config.validate();
                cells.push_back(std::move(cell));
            }
        }
        // Odometer increment, last axis fastest.
        std::size_t i = axes.size();
        while (i > 0) {
            --i;
            if (++idx[i] < axis_values(cfg.sweep.axes, axes[i]).size()) break;
            idx[i] = 0;
            if (i == 0) return cells;
        }
        if (axes.empty()) return cells;
    }
}

MetricsReport run_cell(const SweepCell& cell) {
    const RunConfig& c = cell.config;
    const Sequence seq = generate_downsampled(c.synth, c.run.rate_factor);
    auto det = make_detector(cell.detector, c.pipeline);
    const double radius = c.matching.match_radius + std::max(c.synth.target_size.x, c.synth.target_size.y) / 2.0;
    return evaluate_detector(*det, seq, c.matching, radius);
}

std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells, std::size_t threads,
                                const SweepProgress& progress) {
    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex mu;
    std::exception_ptr failure;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard lock(mu);
                if (failure) return;
            }
            try {
                rows[i].cell = cells[i];
                rows[i].report = run_cell(cells[i]);
                std::lock_guard lock(mu);
                ++done;
                if (progress) progress(done, cells.size(), rows[i]);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, cells.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
    std::vector<std::string> axes;
    for (const SweepRow& r : rows) {
        for (const auto& [name, value] : r.cell.params) {
            if (std::find(axes.begin(), axes.end(), name) == axes.end()) axes.push_back(name);
        }
    }
    std::ostringstream os;
    os << "detector,seed";
    for (const std::string& a : axes) os << "," << a;
    os << ",frames_evaluated,auc,ap,f1,best_threshold,mean_angular_error_deg,median_angular_error_deg,"
          "time_per_frame_ms,target_response";
    for (const std::string& op : op_columns()) os << ",ops_" << op;
    os << "\n";
    constexpr double deg = 180.0 / 3.14159265358979323846;
    for (const SweepRow& r : rows) {
        os << to_string(r.cell.detector) << "," << r.cell.seed;
        for (const std::string& a : axes) {
            auto it = std::find_if(r.cell.params.begin(), r.cell.params.end(),
                                   [&](const auto& p) { return p.first == a; });
            os << ",";
            if (it != r.cell.params.end()) os << fmt(it->second);
        }
        const MetricsReport& m = r.report;
        os << "," << m.frames_evaluated << "," << fmt(m.auc) << "," << fmt(m.ap) << "," << fmt(m.f1) << ","
           << fmt(m.best_threshold) << ",";
        if (m.mean_angular_error) os << fmt(*m.mean_angular_error * deg);
        os << ",";
        if (m.median_angular_error) os << fmt(*m.median_angular_error * deg);
        os << "," << fmt(m.time_per_frame_ms) << "," << fmt(m.target_response);
        for (const std::string& op : op_columns()) {
            auto it = m.op_counts.find(op);
            os << "," << (it == m.op_counts.end() ? 0 : it->second);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace stmd::cli
