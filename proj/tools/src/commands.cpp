#include "stmd/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "stmd/cli/records.hpp"
#include "stmd/errors.hpp"
#include "stmd/image_io.hpp"

namespace stmd::cli {

namespace {

std::string frame_name(std::size_t index, std::size_t total) {
    std::size_t digits = std::max<std::size_t>(6, std::to_string(total).size());
    std::string n = std::to_string(index);
    return "frame_" + std::string(digits - std::min(digits, n.size()), '0') + n + ".pgm";
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

SynthSummary cmd_synth(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    cfg.validate();
    const Sequence seq = generate_downsampled(cfg.synth, cfg.run.rate_factor);
    const std::string hash = config_hash(cfg);
    SynthSummary summary;
    summary.frames = seq.frames.size();
    summary.frame_dir = out_dir / "frames";
    summary.track_file = out_dir / "track.jsonl";
    fs::create_directories(summary.frame_dir);
    for (std::size_t n = 0; n < seq.frames.size(); ++n) {
        write_pgm(summary.frame_dir / frame_name(n, seq.frames.size()), seq.frames[n]);
    }
    write_file_atomic(summary.track_file, encode_track({hash, seq.rate_hz, seq.track}));
    write_file_atomic(out_dir / "config.yaml", dump_config(cfg));
    log << "synth: " << summary.frames << " frames " << cfg.synth.width << "x" << cfg.synth.height << " seed "
        << cfg.synth.seed << " rate " << seq.rate_hz << " Hz config " << hash << " -> " << out_dir.string() << "\n";
    return summary;
}

DetectSummary cmd_detect(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    cfg.validate();
    auto detector = make_detector(cfg.run.detector, cfg.pipeline);
    DetectSummary summary;
    summary.warmup_frames = detector->warmup_frames();
    summary.detections_file = out_dir / "detections.jsonl";

    std::string body;
    auto consume = [&](const Grid2D& frame, std::size_t n) {
        DetectorOutput out = detector->step(frame);
        if (n < summary.warmup_frames) return;
        const DirectionField* dirs = out.directions ? &*out.directions : nullptr;
        for (const Detection& d : extract_detections(out.response, cfg.run.threshold, cfg.matching, n, dirs)) {
            body += encode_detection_line(d);
            ++summary.detections;
        }
    };

    if (cfg.run.input.empty()) {
        const Sequence seq = generate_downsampled(cfg.synth, cfg.run.rate_factor);
        for (std::size_t n = 0; n < seq.frames.size(); ++n) consume(seq.frames[n], n);
        summary.frames = seq.frames.size();
    } else {
        const std::vector<fs::path> files = list_frames(cfg.run.input);
        if (files.empty()) throw IoError("run.input: no .pgm or .png frames in " + cfg.run.input);
        std::size_t height = 0, width = 0;
        for (std::size_t n = 0; n < files.size(); ++n) {
            Grid2D frame;
            try {
                frame = read_frame(files[n]);
            } catch (const Error& e) {
                throw IoError("unreadable frame " + files[n].filename().string() + ": " + e.what());
            }
            if (n == 0) {
                height = frame.height();
                width = frame.width();
            } else if (frame.height() != height || frame.width() != width) {
                throw SizingError("frame " + files[n].filename().string() + " is " + std::to_string(frame.width()) +
                                  "x" + std::to_string(frame.height()) + ", expected " + std::to_string(width) +
                                  "x" + std::to_string(height));
            }
            consume(frame, n);
        }
        summary.frames = files.size();
    }

    DetectionsHeader header;
    header.detector = to_string(cfg.run.detector);
    header.config_hash = config_hash(cfg);
    header.warmup_frames = summary.warmup_frames;
    header.frames = summary.frames;
    header.threshold = cfg.run.threshold;
    write_file_atomic(summary.detections_file, encode_detections_header(header) + body);
    log << "detect: " << header.detector << " " << summary.frames << " frames, warm-up " << summary.warmup_frames
        << ", " << summary.detections << " detections, config " << header.config_hash << " -> "
        << summary.detections_file.string() << "\n";
    return summary;
}

MetricsReport cmd_eval(const fs::path& detections_file, const fs::path& track_file, const RunConfig& cfg,
                       const fs::path& out_dir, std::ostream& log) {
    cfg.validate();
    const DetectionsFile dets = read_detections(detections_file);
    const TrackFile track = read_track(track_file);
    std::size_t max_frame = 0;
    for (const Detection& d : dets.detections) max_frame = std::max(max_frame, d.frame_index);
    const bool beyond = !dets.detections.empty() && max_frame >= track.track.size();
    if (dets.header.frames != track.track.size() || beyond) {
        std::ostringstream msg;
        msg << "frame count mismatch: detections header covers frames [0, " << dets.header.frames << ")";
        if (!dets.detections.empty()) msg << " with detections up to frame " << max_frame;
        msg << ", track covers frames [0, " << track.track.size() << ")";
        throw Error(msg.str());
    }
    MetricsReport report =
        evaluate(group_by_frame(dets.detections, track.track, dets.header.warmup_frames), cfg.matching);

    std::ostringstream text;
    text << "detector: " << dets.header.detector << "\n";
    text << "detections_config_hash: " << dets.header.config_hash << "\n";
    text << "track_config_hash: " << track.config_hash.value_or("none") << "\n";
    text << "eval_config_hash: " << config_hash(cfg) << "\n";
    text << "warmup_frames: " << dets.header.warmup_frames << "\n";
    text << format_report(report);
    write_file_atomic(out_dir / "report.txt", text.str());
    write_file_atomic(out_dir / "curve.csv", format_curve_csv(report));
    log << "eval: " << dets.header.detector << " auc " << fixed(report.auc, 4) << " ap " << fixed(report.ap, 4)
        << " f1 " << fixed(report.f1, 4) << " over " << report.frames_evaluated << " frames -> "
        << (out_dir / "report.txt").string() << "\n";
    return report;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::size_t threads,
                                std::ostream& log) {
    cfg.validate();
    const std::vector<SweepCell> cells = expand_sweep(cfg);
    log << "sweep: " << cells.size() << " cells on " << std::max<std::size_t>(1, threads) << " thread(s), config "
        << config_hash(cfg) << "\n";
    std::vector<SweepRow> rows = run_sweep(cells, threads, [&](std::size_t done, std::size_t total, const SweepRow& r) {
        log << "  [" << done << "/" << total << "] " << to_string(r.cell.detector) << " seed " << r.cell.seed;
        for (const auto& [name, value] : r.cell.params) log << " " << name << "=" << value;
        log << " auc " << fixed(r.report.auc, 4) << "\n";
    });
    write_file_atomic(out_dir / "sweep.csv", format_sweep_csv(rows));
    log << "sweep: wrote " << (out_dir / "sweep.csv").string() << "\n";
    return rows;
}

BenchReport cmd_bench(const RunConfig& cfg, const std::vector<DetectorKind>& detectors, const fs::path& out_dir,
                      std::ostream& log) {
    cfg.validate();
    std::vector<DetectorKind> kinds = detectors;
    for (DetectorKind k : {DetectorKind::stmdnet, DetectorKind::dstmd}) {
        if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    }
    SynthConfig synth = cfg.synth;
    synth.frames = std::max<std::size_t>(synth.frames, 210);
    const Sequence seq = generate_sequence(synth);

    BenchReport report;
    report.height = synth.height;
    report.width = synth.width;
    report.frames = seq.frames.size();
    for (DetectorKind k : kinds) {
        auto det = make_detector(k, cfg.pipeline);
        BenchEntry e;
        e.detector = to_string(k);
        e.ms_per_frame = timing_run(*det, seq.frames);
        e.ops = det->last_ops();
        if (k == DetectorKind::dstmd) report.dstmd_directional = e.ops[ops::directional_correlations];
        if (k == DetectorKind::stmdnet) report.stmdnet_locate = e.ops[ops::locate_correlations];
        report.entries.push_back(std::move(e));
    }
    const std::string text = format_bench(report);
    write_file_atomic(out_dir / "bench.txt", text);
    log << text;
    return report;
}

std::string format_bench(const BenchReport& report) {
    std::ostringstream os;
    os << "bench: " << report.width << "x" << report.height << ", " << report.frames
       << " frames, 10 skipped, single thread\n";
    for (const BenchEntry& e : report.entries) {
        os << e.detector << ": " << fixed(e.ms_per_frame, 3) << " ms/frame (" << fixed(1000.0 / e.ms_per_frame, 1)
           << " fps)\n";
        for (const auto& [stage, count] : e.ops) os << "  ops." << stage << ": " << count << "\n";
    }
    os << "correlations per location: dstmd " << report.dstmd_directional << " directional, stmdnet "
       << report.stmdnet_locate << " locate";
    if (report.stmdnet_locate > 0) {
        const std::uint64_t g = std::gcd(report.dstmd_directional, report.stmdnet_locate);
        os << ", ratio " << report.dstmd_directional / g << ":" << report.stmdnet_locate / g;
    }
    os << "\n";
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Small target motion detection: synthetic data, detectors and evaluation", "stmd"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    std::string detector_name;
    std::string detections_path;
    std::string track_path;
    bool print_config = false;

    auto common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);
        if (with_out) sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override synth.seed");
        sub->add_option("--threads", threads, "Worker threads (sweep only)")->capture_default_str();
        sub->add_option("--detector", detector_name, "Override run.detector");
    };
    CLI::App* synth = app.add_subcommand("synth", "Render a synthetic sequence and its ground-truth track");
    common(synth, true);
    CLI::App* detect = app.add_subcommand("detect", "Run a detector over a frame directory or synth sequence");
    common(detect, true);
    CLI::App* eval = app.add_subcommand("eval", "Score a detections file against a track file");
    common(eval, true);
    eval->add_option("detections", detections_path, "detections.jsonl")->required()->check(CLI::ExistingFile);
    eval->add_option("track", track_path, "track.jsonl")->required()->check(CLI::ExistingFile);
    CLI::App* sweep = app.add_subcommand("sweep", "Run a full factorial parameter sweep");
    common(sweep, true);
    CLI::App* bench = app.add_subcommand("bench", "Time detectors single-threaded and count operations");
    common(bench, true);
    CLI::App* config = app.add_subcommand("config", "Print the resolved config and its environment variable names");
    common(config, false);
    config->add_flag("--resolved", print_config, "Print only the resolved YAML");

    std::vector<std::string> argv_store{"stmd"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        RunConfig cfg = load_config(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path), env);
        if (seed) cfg.synth.seed = *seed;
        std::vector<DetectorKind> requested;
        if (!detector_name.empty()) {
            try {
                cfg.run.detector = parse_detector_kind(detector_name);
            } catch (const Error&) {
                throw ConfigError("--detector: unknown detector '" + detector_name + "'");
            }
            cfg.sweep.detectors = {cfg.run.detector};
            requested.push_back(cfg.run.detector);
        }
        cfg.validate();

        if (*synth) {
            cmd_synth(cfg, out_dir, out);
        } else if (*detect) {
            cmd_detect(cfg, out_dir, out);
        } else if (*eval) {
            cmd_eval(detections_path, track_path, cfg, out_dir, out);
        } else if (*sweep) {
            cmd_sweep(cfg, out_dir, threads, out);
        } else if (*bench) {
            if (requested.empty()) {
                requested = {DetectorKind::stmdnet, DetectorKind::stmdnet_f, DetectorKind::dstmd, DetectorKind::estmd};
            }
            cmd_bench(cfg, requested, out_dir, out);
        } else if (*config) {
            out << "# config " << config_hash(cfg) << "\n" << dump_config(cfg);
            if (!print_config) {
                out << "# environment overrides\n";
                for (const auto& [path, name] : env_override_names()) out << "# " << name << " -> " << path << "\n";
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace stmd::cli
