#include "stmd/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stmd/errors.hpp"

namespace stmd::cli {

namespace {

YAML::Node num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    // Keep a decimal point so the scalar reads back as a float.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return YAML::Node(s);
}

YAML::Node num(std::size_t v) { return YAML::Node(std::to_string(v)); }

YAML::Node vec(const Vec2& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    n.push_back(num(v.x));
    n.push_back(num(v.y));
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node offset(const PixelOffset& o) {
    YAML::Node n(YAML::NodeType::Sequence);
    n.push_back(YAML::Node(std::to_string(o.dx)));
    n.push_back(YAML::Node(std::to_string(o.dy)));
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node list(const std::vector<double>& values) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (double v : values) n.push_back(num(v));
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node lamina_node(const LaminaConfig& c) {
    YAML::Node n;
    n["mode"] = c.mode == LaminaMode::fractional ? "fractional" : "plain_diff";
    n["frac_order"] = num(c.frac_order);
    n["memory"] = num(c.memory);
    return n;
}

YAML::Node to_yaml(const RunConfig& c) {
    YAML::Node root;

    YAML::Node run;
    run["detector"] = to_string(c.run.detector);
    run["input"] = c.run.input;
    run["threshold"] = num(c.run.threshold);
    run["rate_factor"] = num(c.run.rate_factor);
    root["run"] = run;

    const SynthConfig& s = c.synth;
    YAML::Node synth;
    synth["width"] = num(s.width);
    synth["height"] = num(s.height);
    synth["frames"] = num(s.frames);
    synth["seed"] = std::to_string(s.seed);
    synth["base_rate_hz"] = num(s.base_rate_hz);
    YAML::Node bg;
    bg["texture"] = s.bg_texture == BackgroundTexture::stripes ? "stripes" : "noise";
    bg["velocity"] = vec(s.bg_velocity);
    bg["mean"] = num(s.bg_mean_luminance);
    bg["contrast"] = num(s.bg_contrast);
    bg["stripe_min_width"] = num(s.stripe_min_width);
    bg["stripe_max_width"] = num(s.stripe_max_width);
    bg["noise_scale"] = num(s.noise_scale);
    synth["background"] = bg;
    YAML::Node target;
    target["width"] = num(s.target_size.x);
    target["height"] = num(s.target_size.y);
    target["luminance"] = num(s.target_luminance);
    synth["target"] = target;
    YAML::Node path;
    LinearPath lin;
    CircularPath circ;
    std::optional<Vec2> circ_center;
    if (const auto* l = std::get_if<LinearPath>(&s.target_path)) {
        path["kind"] = "linear";
        lin = *l;
    } else {
        path["kind"] = "circular";
        circ = std::get<CircularPath>(s.target_path);
        circ_center = circ.center;
    }
    path["velocity"] = vec(lin.velocity);
    path["start"] = lin.start ? vec(*lin.start) : YAML::Node(YAML::NodeType::Null);
    path["center"] = circ_center ? vec(*circ_center) : YAML::Node(YAML::NodeType::Null);
    path["radius"] = num(circ.radius);
    path["angular_speed"] = num(circ.angular_speed);
    path["phase"] = num(circ.phase);
    synth["path"] = path;
    root["synth"] = synth;

    const PipelineConfig& p = c.pipeline;
    YAML::Node retina;
    retina["sigma"] = num(p.retina.sigma);
    retina["radius"] = num(p.retina.radius);
    root["retina"] = retina;
    root["lamina"] = lamina_node(p.stmdnet.lamina);
    root["classical_lamina"] = lamina_node(p.classical_lamina);

    YAML::Node medulla;
    medulla["decay_g"] = num(p.stmdnet.medulla.decay_g);
    medulla["inhib_gain"] = num(p.stmdnet.medulla.inhib_gain);
    medulla["inhib_sigma"] = num(p.stmdnet.medulla.inhib_sigma);
    medulla["step_dt"] = num(p.stmdnet.medulla.step_dt);
    medulla["excit_gain"] = num(p.stmdnet.medulla.excit_gain);
    medulla["ceiling"] = num(p.stmdnet.medulla.ceiling);
    root["medulla"] = medulla;

    YAML::Node ldfc;
    ldfc["guard_eps"] = num(p.stmdnet.ldfc.guard_eps);
    ldfc["noise_floor"] = num(p.stmdnet.ldfc.noise_floor);
    ldfc["decode_radius"] = num(p.stmdnet.ldfc.decode_radius);
    ldfc["polarity"] = p.stmdnet.ldfc.polarity == TargetPolarity::dark ? "dark" : "bright";
    root["ldfc"] = ldfc;

    YAML::Node feedback;
    feedback["fb_gain"] = num(p.feedback.fb_gain);
    feedback["fb_delay"] = num(p.feedback.fb_delay);
    feedback["fb_sigma"] = num(p.feedback.fb_sigma);
    root["feedback"] = feedback;

    YAML::Node emd;
    emd["delay_tau"] = num(p.emd.delay_tau);
    emd["offset"] = offset(p.emd.offset);
    emd["second_delay"] = num(p.emd.second_delay);
    emd["second_offset"] = offset(p.emd.second_offset);
    emd["division_guard"] = num(p.emd.division_guard);
    root["emd"] = emd;

    YAML::Node estmd;
    estmd["tau"] = num(p.estmd_tau);
    root["estmd"] = estmd;

    YAML::Node dstmd;
    dstmd["directions"] = num(p.dstmd.directions);
    dstmd["alpha_sep"] = num(p.dstmd.alpha_sep);
    dstmd["tau1"] = num(p.dstmd.tau1);
    dstmd["tau3"] = num(p.dstmd.tau3);
    dstmd["delay_tau"] = num(p.dstmd.delay_tau);
    root["dstmd"] = dstmd;

    YAML::Node matching;
    matching["match_radius"] = num(c.matching.match_radius);
    matching["nms_radius"] = num(c.matching.nms_radius);
    matching["threshold_count"] = num(c.matching.threshold_count);
    matching["fppi_max"] = num(c.matching.fppi_max);
    matching["max_per_frame"] = num(c.matching.max_per_frame);
    root["matching"] = matching;

    YAML::Node sweep;
    YAML::Node dets(YAML::NodeType::Sequence);
    for (DetectorKind k : c.sweep.detectors) dets.push_back(to_string(k));
    dets.SetStyle(YAML::EmitterStyle::Flow);
    sweep["detectors"] = dets;
    YAML::Node seeds(YAML::NodeType::Sequence);
    for (std::uint64_t v : c.sweep.seeds) seeds.push_back(std::to_string(v));
    seeds.SetStyle(YAML::EmitterStyle::Flow);
    sweep["seeds"] = seeds;
    YAML::Node axes;
    axes["velocity"] = list(c.sweep.axes.velocity);
    axes["target_size"] = list(c.sweep.axes.target_size);
    axes["contrast"] = list(c.sweep.axes.contrast);
    axes["rate_factor"] = list(c.sweep.axes.rate_factor);
    axes["tau"] = list(c.sweep.axes.tau);
    axes["g_L"] = list(c.sweep.axes.g_L);
    axes["k"] = list(c.sweep.axes.k);
    axes["alpha"] = list(c.sweep.axes.alpha);
    sweep["axes"] = axes;
    sweep["cell_budget"] = num(c.sweep.cell_budget);
    root["sweep"] = sweep;
    return root;
}

// Typed readers that report the key path on failure.
class Reader {
public:
    explicit Reader(const YAML::Node& root) : root_(root) {}

    YAML::Node node(const std::string& path) const {
        YAML::Node cur = root_;
        std::stringstream ss(path);
        std::string part;
        while (std::getline(ss, part, '.')) {
            const YAML::Node& parent = cur;
            YAML::Node next = parent[part];
            cur.reset(next);
        }
        return cur;
    }

    template <class T>
    T get(const std::string& path) const {
        const YAML::Node n = node(path);
        try {
            if (!n.IsScalar()) throw YAML::Exception(YAML::Mark::null_mark(), "not a scalar");
            return n.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(path + ": expected " + kind<T>() + ", got '" + describe(n) + "'");
        }
    }

    std::size_t count(const std::string& path) const {
        // yaml-cpp happily converts "-1" to a huge unsigned value.
        const std::string text = get<std::string>(path);
        if (!text.empty() && text[0] == '-') throw ConfigError(path + ": expected a non-negative integer, got '" + text + "'");
        return get<std::size_t>(path);
    }

    Vec2 vec2(const std::string& path) const {
        const YAML::Node n = node(path);
        if (!n.IsSequence() || n.size() != 2) throw ConfigError(path + ": expected [x, y], got '" + describe(n) + "'");
        try {
            return {n[0].as<double>(), n[1].as<double>()};
        } catch (const YAML::Exception&) {
            throw ConfigError(path + ": expected [x, y] numbers, got '" + describe(n) + "'");
        }
    }

    std::optional<Vec2> optional_vec2(const std::string& path) const {
        if (node(path).IsNull()) return std::nullopt;
        return vec2(path);
    }

    PixelOffset pixel_offset(const std::string& path) const {
        const YAML::Node n = node(path);
        if (!n.IsSequence() || n.size() != 2) throw ConfigError(path + ": expected [dx, dy], got '" + describe(n) + "'");
        try {
            return {n[0].as<int>(), n[1].as<int>()};
        } catch (const YAML::Exception&) {
            throw ConfigError(path + ": expected integer [dx, dy], got '" + describe(n) + "'");
        }
    }

    template <class T>
    std::vector<T> sequence(const std::string& path) const {
        const YAML::Node n = node(path);
        if (n.IsNull()) return {};
        if (!n.IsSequence()) throw ConfigError(path + ": expected a list, got '" + describe(n) + "'");
        std::vector<T> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            try {
                out.push_back(n[i].as<T>());
            } catch (const YAML::Exception&) {
                throw ConfigError(path + "[" + std::to_string(i) + "]: expected " + kind<T>());
            }
        }
        return out;
    }

    std::string choice(const std::string& path, std::initializer_list<const char*> options) const {
        const std::string v = get<std::string>(path);
        std::string joined;
        for (const char* o : options) {
            if (v == o) return v;
            joined += joined.empty() ? o : std::string("|") + o;
        }
        throw ConfigError(path + ": expected one of " + joined + ", got '" + v + "'");
    }

private:
    template <class T>
    static std::string kind() {
        if constexpr (std::is_same_v<T, std::string>) return "a string";
        else if constexpr (std::is_floating_point_v<T>) return "a number";
        else return "an integer";
    }

    static std::string describe(const YAML::Node& n) {
        YAML::Emitter e;
        e << YAML::Flow << n;
        return e.c_str();
    }

    YAML::Node root_;
};

LaminaConfig read_lamina(const Reader& r, const std::string& section) {
    LaminaConfig c;
    c.mode = r.choice(section + ".mode", {"fractional", "plain_diff"}) == "fractional" ? LaminaMode::fractional
                                                                                        : LaminaMode::plain_diff;
    c.frac_order = r.get<double>(section + ".frac_order");
    c.memory = r.count(section + ".memory");
    return c;
}

DetectorKind read_detector(const std::string& name, const std::string& path) {
    try {
        return parse_detector_kind(name);
    } catch (const Error&) {
        std::string joined;
        for (const std::string& n : detector_names()) joined += (joined.empty() ? "" : "|") + n;
        throw ConfigError(path + ": unknown detector '" + name + "', expected one of " + joined);
    }
}

RunConfig from_yaml(const YAML::Node& root) {
    const Reader r(root);
    RunConfig c;

    c.run.detector = read_detector(r.get<std::string>("run.detector"), "run.detector");
    c.run.input = r.node("run.input").IsNull() ? std::string() : r.get<std::string>("run.input");
    c.run.threshold = r.get<double>("run.threshold");
    c.run.rate_factor = r.count("run.rate_factor");

    SynthConfig& s = c.synth;
    s.width = r.count("synth.width");
    s.height = r.count("synth.height");
    s.frames = r.count("synth.frames");
    s.seed = r.get<std::uint64_t>("synth.seed");
    s.base_rate_hz = r.get<double>("synth.base_rate_hz");
    s.bg_texture = r.choice("synth.background.texture", {"stripes", "noise"}) == "stripes"
                       ? BackgroundTexture::stripes
                       : BackgroundTexture::filtered_noise;
    s.bg_velocity = r.vec2("synth.background.velocity");
    s.bg_mean_luminance = r.get<double>("synth.background.mean");
    s.bg_contrast = r.get<double>("synth.background.contrast");
    s.stripe_min_width = r.get<double>("synth.background.stripe_min_width");
    s.stripe_max_width = r.get<double>("synth.background.stripe_max_width");
    s.noise_scale = r.get<double>("synth.background.noise_scale");
    s.target_size = {r.get<double>("synth.target.width"), r.get<double>("synth.target.height")};
    s.target_luminance = r.get<double>("synth.target.luminance");
    if (r.choice("synth.path.kind", {"linear", "circular"}) == "linear") {
        LinearPath lin;
        lin.velocity = r.vec2("synth.path.velocity");
        lin.start = r.optional_vec2("synth.path.start");
        s.target_path = lin;
    } else {
        CircularPath circ;
        circ.center = r.optional_vec2("synth.path.center")
                          .value_or(Vec2{(static_cast<double>(s.width) - 1.0) / 2.0,
                                         (static_cast<double>(s.height) - 1.0) / 2.0});
        circ.radius = r.get<double>("synth.path.radius");
        circ.angular_speed = r.get<double>("synth.path.angular_speed");
        circ.phase = r.get<double>("synth.path.phase");
        s.target_path = circ;
    }

    PipelineConfig& p = c.pipeline;
    p.retina.sigma = r.get<double>("retina.sigma");
    p.retina.radius = r.count("retina.radius");
    p.stmdnet.retina = p.retina;
    p.stmdnet.lamina = read_lamina(r, "lamina");
    p.classical_lamina = read_lamina(r, "classical_lamina");
    MedullaConfig& m = p.stmdnet.medulla;
    m.decay_g = r.get<double>("medulla.decay_g");
    m.inhib_gain = r.get<double>("medulla.inhib_gain");
    m.inhib_sigma = r.get<double>("medulla.inhib_sigma");
    m.step_dt = r.get<double>("medulla.step_dt");
    m.excit_gain = r.get<double>("medulla.excit_gain");
    m.ceiling = r.get<double>("medulla.ceiling");
    LdfcConfig& l = p.stmdnet.ldfc;
    l.guard_eps = r.get<double>("ldfc.guard_eps");
    l.noise_floor = r.get<double>("ldfc.noise_floor");
    l.decode_radius = r.count("ldfc.decode_radius");
    l.polarity = r.choice("ldfc.polarity", {"dark", "bright"}) == "dark" ? TargetPolarity::dark : TargetPolarity::bright;
    p.feedback.fb_gain = r.get<double>("feedback.fb_gain");
    p.feedback.fb_delay = r.count("feedback.fb_delay");
    p.feedback.fb_sigma = r.get<double>("feedback.fb_sigma");
    p.emd.delay_tau = r.count("emd.delay_tau");
    p.emd.offset = r.pixel_offset("emd.offset");
    p.emd.second_delay = r.count("emd.second_delay");
    p.emd.second_offset = r.pixel_offset("emd.second_offset");
    p.emd.division_guard = r.get<double>("emd.division_guard");
    p.estmd_tau = r.count("estmd.tau");
    p.dstmd.directions = r.count("dstmd.directions");
    p.dstmd.alpha_sep = r.get<double>("dstmd.alpha_sep");
    p.dstmd.tau1 = r.count("dstmd.tau1");
    p.dstmd.tau3 = r.count("dstmd.tau3");
    p.dstmd.delay_tau = r.count("dstmd.delay_tau");

    c.matching.match_radius = r.get<double>("matching.match_radius");
    c.matching.nms_radius = r.get<double>("matching.nms_radius");
    c.matching.threshold_count = r.count("matching.threshold_count");
    c.matching.fppi_max = r.get<double>("matching.fppi_max");
    c.matching.max_per_frame = r.count("matching.max_per_frame");

    c.sweep.detectors.clear();
    for (const std::string& name : r.sequence<std::string>("sweep.detectors")) {
        c.sweep.detectors.push_back(read_detector(name, "sweep.detectors"));
    }
    c.sweep.seeds = r.sequence<std::uint64_t>("sweep.seeds");
    c.sweep.axes.velocity = r.sequence<double>("sweep.axes.velocity");
    c.sweep.axes.target_size = r.sequence<double>("sweep.axes.target_size");
    c.sweep.axes.contrast = r.sequence<double>("sweep.axes.contrast");
    c.sweep.axes.rate_factor = r.sequence<double>("sweep.axes.rate_factor");
    c.sweep.axes.tau = r.sequence<double>("sweep.axes.tau");
    c.sweep.axes.g_L = r.sequence<double>("sweep.axes.g_L");
    c.sweep.axes.k = r.sequence<double>("sweep.axes.k");
    c.sweep.axes.alpha = r.sequence<double>("sweep.axes.alpha");
    c.sweep.cell_budget = r.count("sweep.cell_budget");
    return c;
}

void overlay(YAML::Node base, const YAML::Node& user, const std::string& path) {
    if (!user.IsMap()) throw ConfigError((path.empty() ? std::string("config root") : path) + ": expected a mapping");
    for (const auto& kv : user) {
        const std::string key = kv.first.as<std::string>();
        const std::string full = path.empty() ? key : path + "." + key;
        if (!base[key]) throw ConfigError("unknown key " + full);
        if (base[key].IsMap()) {
            overlay(base[key], kv.second, full);
        } else {
            base[key] = YAML::Clone(kv.second);
        }
    }
}

void collect_leaves(const YAML::Node& n, const std::string& path, std::vector<std::string>& out) {
    if (!n.IsMap()) {
        out.push_back(path);
        return;
    }
    for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        collect_leaves(kv.second, path.empty() ? key : path + "." + key, out);
    }
}

std::string env_name(const std::string& path) {
    std::string out = "STMD_";
    for (char ch : path) out.push_back(ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    return out;
}

void set_path(YAML::Node root, const std::string& path, const YAML::Node& value) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) cur.reset(cur[parts[i]]);
    cur[parts.back()] = value;
}

template <class Fn>
void wrap(const std::string& section, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(section + ": " + e.what());
    }
}

}  // namespace

void RunConfig::validate() const {
    synth.validate();
    if (run.rate_factor < 1) throw ConfigError("run.rate_factor must be >= 1");
    if (!(pipeline.retina.sigma >= 0.0)) throw ConfigError("retina.sigma must be >= 0");
    wrap("lamina", [&] { pipeline.stmdnet.lamina.validate(); });
    wrap("classical_lamina", [&] { pipeline.classical_lamina.validate(); });
    wrap("medulla", [&] { pipeline.stmdnet.medulla.validate(); });
    wrap("ldfc", [&] { pipeline.stmdnet.ldfc.validate(); });
    wrap("feedback", [&] { pipeline.feedback.validate(); });
    wrap("emd", [&] { pipeline.emd.validate(); });
    wrap("dstmd", [&] { pipeline.dstmd.validate(); });
    if (pipeline.estmd_tau < 1) throw ConfigError("estmd.tau must be >= 1");
    wrap("matching", [&] { matching.validate(); });
    if (sweep.detectors.empty()) throw ConfigError("sweep.detectors must name at least one detector");
    for (double f : sweep.axes.rate_factor) {
        if (!(f >= 1.0) || f != std::floor(f)) throw ConfigError("sweep.axes.rate_factor values must be integers >= 1");
    }
    for (double t : sweep.axes.tau) {
        if (!(t >= 1.0) || t != std::floor(t)) throw ConfigError("sweep.axes.tau values must be integers >= 1");
    }
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
    };
}

RunConfig parse_config(const std::string& yaml_text, const EnvLookup& env) {
    YAML::Node merged = to_yaml(RunConfig{});
    YAML::Node user;
    try {
        user = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (user.IsDefined() && !user.IsNull()) overlay(merged, user, "");

    if (env) {
        std::vector<std::string> leaves;
        collect_leaves(merged, "", leaves);
        for (const std::string& path : leaves) {
            const std::string name = env_name(path);
            const std::optional<std::string> value = env(name);
            if (!value) continue;
            try {
                set_path(merged, path, YAML::Load(*value));
            } catch (const YAML::Exception& e) {
                throw ConfigError(name + " (" + path + "): cannot parse '" + *value + "'");
            }
        }
    }

    RunConfig cfg = from_yaml(merged);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env) {
    if (!path) return parse_config("", env);
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot read config file " + path->string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), env);
}

std::string dump_config(const RunConfig& cfg) {
    YAML::Emitter out;
    out << to_yaml(cfg);
    return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump_config(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::pair<std::string, std::string>> env_override_names() {
    std::vector<std::string> leaves;
    collect_leaves(to_yaml(RunConfig{}), "", leaves);
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& p : leaves) out.emplace_back(p, env_name(p));
    return out;
}

}  // namespace stmd::cli
