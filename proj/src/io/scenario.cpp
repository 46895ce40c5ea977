#include "pxa/io/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "pxa/io/pnm.hpp"

namespace pxa::io {

std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::syntax: return "syntax";
        case ErrorKind::validation: return "validation";
        case ErrorKind::gain_rule: return "gain_rule";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::syntax: return 2;
        case ErrorKind::validation: return 3;
        case ErrorKind::gain_rule: return 4;
        case ErrorKind::io: return 5;
    }
    return 1;
}

namespace {

std::string format_error(ErrorKind kind, const std::string& message, int line, int column) {
    std::string s = std::string(to_string(kind)) + " error";
    if (line > 0) s += " at " + std::to_string(line) + ":" + std::to_string(column);
    return s + ": " + message;
}

}  // namespace

ScenarioError::ScenarioError(ErrorKind kind, const std::string& message, int line, int column)
    : std::runtime_error(format_error(kind, message, line, column)),
      kind_(kind), line_(line), column_(column), message_(message) {}

ExportToggles parse_exports(std::string_view list) {
    ExportToggles e{false, false, false, false, false};
    std::size_t pos = 0;
    while (pos <= list.size()) {
        std::size_t end = list.find(',', pos);
        if (end == std::string_view::npos) end = list.size();
        std::string_view item = list.substr(pos, end - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item == "all") e = {true, true, true, true, true};
        else if (item == "none" || item.empty()) {}
        else if (item == "frames") e.frames = true;
        else if (item == "exposure") e.exposure = true;
        else if (item == "flow") e.flow = true;
        else if (item == "metrics") e.metrics = true;
        else if (item == "hdr") e.hdr = true;
        else throw ContractViolation("unknown export '" + std::string(item) + "'");
        pos = end + 1;
    }
    return e;
}

std::string print_exports(const ExportToggles& e) {
    std::string s;
    auto add = [&](bool on, const char* n) {
        if (!on) return;
        if (!s.empty()) s += ",";
        s += n;
    };
    add(e.frames, "frames");
    add(e.exposure, "exposure");
    add(e.flow, "flow");
    add(e.metrics, "metrics");
    add(e.hdr, "hdr");
    return s.empty() ? "none" : s;
}

void Scenario::normalize() {
    scene.seed = seed;
    system.sensor.seed = seed;
    system.sensor.e_max = system.controller.e_max;
    system.controller.full_scale = system.adc.max_code();
}

void Scenario::validate() const {
    auto fail = [](const std::string& m) { throw ScenarioError(ErrorKind::validation, m); };
    if (name.empty()) fail("scenario.name must not be empty");
    if (frames < 1) fail("scenario.frames must be >= 1");
    try {
        system.sensor.validate();
        system.adc.validate();
        system.controller.validate_for(scene.width, scene.height);
        system.loop.validate(system.controller.e_max);
        if (system.sensor.e_max != system.controller.e_max)
            fail("sensor and controller e_max differ");
        (void)build_scene();
    } catch (const ContractViolation& e) {
        fail(e.what());
    }
    try {
        controller::check_gain_rule(system.controller);
    } catch (const controller::GainRuleViolation& e) {
        throw ScenarioError(ErrorKind::gain_rule, e.what());
    }
}

scene::Scene Scenario::build_scene() const {
    std::vector<scene::Region> rs;
    rs.reserve(regions.size());
    for (const auto& r : regions) rs.push_back(r.region);
    return scene::Scene(scene, background, std::move(rs));
}

namespace {

// ---- value codecs --------------------------------------------------------

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct ValueError {
    std::string message;
    std::size_t offset = 0;  // within the value
};

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
    std::size_t a = 0;
    while (a < s.size() && (s[a] == ' ' || s[a] == '\t')) ++a;
    std::size_t b = s.size();
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    if (lead) *lead = a;
    return s.substr(a, b - a);
}

template <class T>
T parse_num(std::string_view s, std::size_t base = 0) {
    std::size_t lead = 0;
    const std::string_view t = trim(s, &lead);
    T v{};
    if (!t.empty() && t.front() == '+') {
        return parse_num<T>(t.substr(1), base + lead + 1);
    }
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ValueError{"expected a number, got '" + std::string(t) + "'", base + lead};
    return v;
}

bool parse_bool(std::string_view s) {
    const auto t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ValueError{"expected a boolean, got '" + std::string(t) + "'", 0};
}

// Splits on `sep`, keeping each piece's offset within the original string.
std::vector<std::pair<std::string_view, std::size_t>> split(std::string_view s, char sep) {
    std::vector<std::pair<std::string_view, std::size_t>> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t end = s.find(sep, pos);
        out.push_back({s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos), pos});
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

std::vector<double> parse_list(std::string_view s, std::size_t expected, char sep = ',') {
    std::vector<double> v;
    for (const auto& [piece, off] : split(s, sep)) v.push_back(parse_num<double>(piece, off));
    if (v.size() != expected)
        throw ValueError{"expected " + std::to_string(expected) + " values, got " +
                             std::to_string(v.size()),
                         0};
    return v;
}

std::vector<double> parse_words(std::string_view s, std::size_t off0) {
    std::vector<double> v;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        v.push_back(parse_num<double>(s.substr(i, j - i), off0 + i));
        i = j;
    }
    return v;
}

scene::Vec2 parse_vec2(std::string_view s) {
    const auto v = parse_list(s, 2);
    return {v[0], v[1]};
}

std::string fmt(const scene::Vec2& v) { return fmt(v.x) + ", " + fmt(v.y); }

std::vector<scene::MotionSegment> parse_motion(std::string_view s) {
    std::vector<scene::MotionSegment> segs;
    for (const auto& [piece, off] : split(s, ';')) {
        if (trim(piece).empty()) continue;
        const auto v = parse_words(piece, off);
        if (v.size() != 5)
            throw ValueError{"motion segment needs 't0 t1 vx vy omega'", off};
        segs.push_back({v[0], v[1], v[2], v[3], v[4]});
    }
    return segs;
}

std::string fmt(const std::vector<scene::MotionSegment>& segs) {
    std::string s;
    for (const auto& m : segs) {
        if (!s.empty()) s += "; ";
        s += fmt(m.t_begin_ms) + " " + fmt(m.t_end_ms) + " " + fmt(m.vx) + " " + fmt(m.vy) + " " +
             fmt(m.omega);
    }
    return s;
}

pipeline::EdgeProbe parse_probe(std::string_view s) {
    std::size_t lead = 0;
    const auto t = trim(s, &lead);
    const std::size_t sp = t.find(' ');
    const std::string_view kind = t.substr(0, sp);
    const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : t.substr(sp);
    const std::size_t off = lead + (sp == std::string_view::npos ? t.size() : sp);
    pipeline::EdgeProbe p;
    if (kind == "circle") {
        const auto v = parse_words(rest, off);
        if (v.size() != 3) throw ValueError{"circle probe needs 'cx cy r'", off};
        p.kind = pipeline::EdgeProbe::Kind::circle;
        p.a = {v[0], v[1]};
        p.radius = v[2];
    } else if (kind == "segment") {
        const auto v = parse_words(rest, off);
        if (v.size() != 4) throw ValueError{"segment probe needs 'x0 y0 x1 y1'", off};
        p.a = {v[0], v[1]};
        p.b = {v[2], v[3]};
    } else {
        throw ValueError{"probe kind must be circle or segment", lead};
    }
    return p;
}

std::string fmt(const pipeline::EdgeProbe& p) {
    if (p.kind == pipeline::EdgeProbe::Kind::circle)
        return "circle " + fmt(p.a.x) + " " + fmt(p.a.y) + " " + fmt(p.radius);
    return "segment " + fmt(p.a.x) + " " + fmt(p.a.y) + " " + fmt(p.b.x) + " " + fmt(p.b.y);
}

// ---- key tables ----------------------------------------------------------

struct ParseContext {
    Scenario& s;
    const std::filesystem::path& base_dir;
    std::set<std::string> seen_required;
};

// A key binds a parser (value text -> scenario) and a printer (scenario ->
// value text, nullopt to omit). Region keys act on the last region.
struct Key {
    const char* name;
    std::function<void(ParseContext&, std::string_view)> parse;
    std::function<std::optional<std::string>(const Scenario&, std::size_t region)> print;
    bool repeatable = false;
};

#define PXA_NUM_KEY(key, T, expr)                                                        \
    Key {                                                                                \
        key, [](ParseContext& c, std::string_view v) { auto& s = c.s; (void)s;           \
                                                       expr = parse_num<T>(v); },        \
            [](const Scenario& s, std::size_t) -> std::optional<std::string> {           \
                return fmt(static_cast<std::conditional_t<std::is_floating_point_v<T>,   \
                                                          double, long long>>(expr));    \
            }                                                                            \
    }

#define PXA_BOOL_KEY(key, expr)                                                         \
    Key {                                                                               \
        key, [](ParseContext& c, std::string_view v) { c.s.expr = parse_bool(v); },     \
            [](const Scenario& s, std::size_t) -> std::optional<std::string> {          \
                return fmt(s.expr);                                                     \
            }                                                                           \
    }

#define PXA_REGION_NUM_KEY(key, field)                                                      \
    Key {                                                                                   \
        key, [](ParseContext& c, std::string_view v) {                                      \
            c.s.regions.back().region.field = parse_num<double>(v);                         \
        },                                                                                  \
            [](const Scenario& s, std::size_t r) -> std::optional<std::string> {            \
                return fmt(s.regions[r].region.field);                                      \
            }                                                                               \
    }

const std::vector<Key>& scenario_keys() {
    static const std::vector<Key> keys{
        {"name", [](ParseContext& c, std::string_view v) {
             c.s.name = std::string(trim(v));
             c.seen_required.insert("scenario.name");
         },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> { return s.name; }},
        {"frames", [](ParseContext& c, std::string_view v) {
             c.s.frames = parse_num<int>(v);
             c.seen_required.insert("scenario.frames");
         },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> { return fmt(static_cast<long long>(s.frames)); }},
        {"seed", [](ParseContext& c, std::string_view v) { c.s.seed = parse_num<std::uint64_t>(v); },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> { return fmt(s.seed); }},
        {"output", [](ParseContext& c, std::string_view v) { c.s.output = std::string(trim(v)); },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> {
             if (s.output.empty()) return std::nullopt;
             return s.output;
         }},
        {"export", [](ParseContext& c, std::string_view v) {
             try {
                 c.s.exports = parse_exports(trim(v));
             } catch (const ContractViolation& e) {
                 throw ValueError{e.what(), 0};
             }
         },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> { return print_exports(s.exports); }},
    };
    return keys;
}

const std::vector<Key>& scene_keys() {
    static const std::vector<Key> keys{
        PXA_NUM_KEY("width", int, s.scene.width),
        PXA_NUM_KEY("height", int, s.scene.height),
        PXA_NUM_KEY("ratio", double, s.scene.ratio),
        PXA_NUM_KEY("supersample", int, s.scene.supersample),
        {"background", [](ParseContext& c, std::string_view v) {
             c.s.background = parse_num<double>(v);
             c.seen_required.insert("scene.background");
         },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> { return fmt(s.background); }},
    };
    return keys;
}

const std::vector<Key>& region_keys() {
    static const std::vector<Key> keys{
        {"shape", [](ParseContext& c, std::string_view v) {
             try {
                 c.s.regions.back().region.shape = scene::shape_from_string(trim(v));
             } catch (const ContractViolation& e) {
                 throw ValueError{e.what(), 0};
             }
         },
         [](const Scenario& s, std::size_t r) -> std::optional<std::string> {
             return std::string(scene::to_string(s.regions[r].region.shape));
         }},
        {"center", [](ParseContext& c, std::string_view v) { c.s.regions.back().region.center = parse_vec2(v); },
         [](const Scenario& s, std::size_t r) -> std::optional<std::string> { return fmt(s.regions[r].region.center); }},
        PXA_REGION_NUM_KEY("half_width", half_width),
        PXA_REGION_NUM_KEY("half_height", half_height),
        PXA_REGION_NUM_KEY("radius", radius),
        PXA_REGION_NUM_KEY("inner_radius", inner_radius),
        PXA_REGION_NUM_KEY("period", period),
        PXA_REGION_NUM_KEY("flux", flux),
        PXA_REGION_NUM_KEY("flux_alt", flux_alt),
        {"pivot", [](ParseContext& c, std::string_view v) {
             auto& m = c.s.regions.back().region.motion;
             m.pivot = parse_vec2(v);
             m.has_pivot = true;
         },
         [](const Scenario& s, std::size_t r) -> std::optional<std::string> {
             const auto& m = s.regions[r].region.motion;
             if (!m.has_pivot) return std::nullopt;
             return fmt(m.pivot);
         }},
        {"motion", [](ParseContext& c, std::string_view v) {
             c.s.regions.back().region.motion.segments = parse_motion(v);
         },
         [](const Scenario& s, std::size_t r) -> std::optional<std::string> {
             const auto& m = s.regions[r].region.motion;
             if (m.segments.empty()) return std::nullopt;
             return fmt(m.segments);
         }},
        {"raster", [](ParseContext& c, std::string_view v) {
             auto& spec = c.s.regions.back();
             spec.raster_path = std::string(trim(v));
             std::filesystem::path p(spec.raster_path);
             if (p.is_relative() && !c.base_dir.empty()) p = c.base_dir / p;
             Graymap g;
             try {
                 g = read_pgm(p);
             } catch (const IoError& e) {
                 throw ScenarioError(ErrorKind::io, e.what());
             }
             auto img = std::make_shared<Image<float>>(g.pixels.width(), g.pixels.height());
             for (std::size_t i = 0; i < img->size(); ++i)
                 (*img)[i] = static_cast<float>(g.pixels[i]) / static_cast<float>(g.maxval);
             spec.region.raster = std::move(img);
         },
         [](const Scenario& s, std::size_t r) -> std::optional<std::string> {
             if (s.regions[r].raster_path.empty()) return std::nullopt;
             return s.regions[r].raster_path;
         }},
    };
    return keys;
}

const std::vector<Key>& sensor_keys() {
    static const std::vector<Key> keys{
        PXA_NUM_KEY("t_base_ms", double, s.system.sensor.t_base_ms),
        PXA_NUM_KEY("conversion_gain", double, s.system.sensor.conversion_gain),
        PXA_NUM_KEY("quantum_efficiency", double, s.system.sensor.quantum_efficiency),
        PXA_NUM_KEY("read_noise", double, s.system.sensor.read_noise_e),
        PXA_NUM_KEY("fpn_sigma", double, s.system.sensor.fpn_sigma_e),
        PXA_NUM_KEY("pd_full_well", double, s.system.sensor.pd_full_well),
        PXA_NUM_KEY("fd_capacity", double, s.system.sensor.fd_capacity),
        PXA_NUM_KEY("mid_capacity", double, s.system.sensor.mid_capacity),
        PXA_NUM_KEY("v_fd_reset", double, s.system.sensor.v_fd_reset),
        PXA_BOOL_KEY("shot_noise", system.sensor.shot_noise),
        {"variant", [](ParseContext& c, std::string_view v) {
             try {
                 c.s.system.sensor.variant = sensor::variant_from_string(trim(v));
             } catch (const ContractViolation& e) {
                 throw ValueError{e.what(), 0};
             }
         },
         [](const Scenario& s, std::size_t) -> std::optional<std::string> {
             return std::string(sensor::to_string(s.system.sensor.variant));
         }},
    };
    return keys;
}

const std::vector<Key>& adc_keys() {
    static const std::vector<Key> keys{
        PXA_NUM_KEY("v_rh", double, s.system.adc.v_rh),
        PXA_NUM_KEY("v_rl", double, s.system.adc.v_rl),
        PXA_NUM_KEY("v_com", double, s.system.adc.v_com),
        PXA_NUM_KEY("v_rp", double, s.system.adc.v_rp),
        PXA_NUM_KEY("cds_gain", double, s.system.adc.cds_gain),
        PXA_NUM_KEY("n_stages", int, s.system.adc.n_stages),
        PXA_NUM_KEY("comparator_offset", double, s.system.adc.comparator_offset),
    };
    return keys;
}

const std::vector<Key>& controller_keys() {
    static const std::vector<Key> keys{
        PXA_NUM_KEY("i_target", double, s.system.controller.i_target),
        PXA_NUM_KEY("e_tol", double, s.system.controller.e_tol),
        PXA_NUM_KEY("kp", double, s.system.controller.kp),
        PXA_NUM_KEY("ki", double, s.system.controller.ki),
        PXA_NUM_KEY("kv", double, s.system.controller.kv),
        PXA_NUM_KEY("block_size", int, s.system.controller.block_size),
        PXA_NUM_KEY("t_switch", int, s.system.controller.t_switch),
        PXA_NUM_KEY("v_tol", double, s.system.controller.v_tol),
        PXA_NUM_KEY("e_max", int, s.system.controller.e_max),
    };
    return keys;
}

const std::vector<Key>& loop_keys() {
    static const std::vector<Key> keys{
        PXA_NUM_KEY("initial_exposure", int, s.system.loop.initial_exposure),
        PXA_BOOL_KEY("median", system.loop.median),
        PXA_NUM_KEY("dark_frames", int, s.system.loop.dark_frames),
        PXA_BOOL_KEY("worst_case_latency", system.loop.worst_case_latency),
        PXA_NUM_KEY("compute_us", double, s.system.loop.compute_us),
        PXA_NUM_KEY("saturation_margin", int, s.system.loop.saturation_margin),
        PXA_NUM_KEY("flow_levels", int, s.system.loop.flow.levels),
        PXA_NUM_KEY("flow_pyr_scale", double, s.system.loop.flow.pyr_scale),
        PXA_NUM_KEY("flow_poly_n", int, s.system.loop.flow.poly_n),
        PXA_NUM_KEY("flow_poly_sigma", double, s.system.loop.flow.poly_sigma),
        PXA_NUM_KEY("flow_win_size", int, s.system.loop.flow.win_size),
        PXA_NUM_KEY("flow_win_sigma", double, s.system.loop.flow.win_sigma),
        PXA_NUM_KEY("flow_iterations", int, s.system.loop.flow.iterations),
        PXA_NUM_KEY("flow_regularization", double, s.system.loop.flow.regularization),
        PXA_NUM_KEY("flow_damping", double, s.system.loop.flow.damping),
        {"probe", [](ParseContext& c, std::string_view v) {
             c.s.system.loop.probes.push_back(parse_probe(v));
         },
         [](const Scenario&, std::size_t) -> std::optional<std::string> { return std::nullopt; },
         true},
    };
    return keys;
}

#undef PXA_NUM_KEY
#undef PXA_BOOL_KEY
#undef PXA_REGION_NUM_KEY

struct Section {
    const char* name;
    const std::vector<Key>& (*keys)();
};

const std::vector<Section>& sections() {
    static const std::vector<Section> s{
        {"scenario", scenario_keys}, {"scene", scene_keys},           {"region", region_keys},
        {"sensor", sensor_keys},     {"adc", adc_keys},               {"controller", controller_keys},
        {"loop", loop_keys},
    };
    return s;
}

const Key* find_key(const std::vector<Key>& keys, std::string_view name) {
    for (const auto& k : keys)
        if (name == k.name) return &k;
    return nullptr;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    Scenario s;
    ParseContext ctx{s, base_dir, {}};
    const Section* current = nullptr;
    std::set<std::string> seen;  // keys within the current section instance
    int line_no = 0;

    for (const auto& [raw_line, off] : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw_line;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t lead = 0;
        const std::string_view t = trim(line, &lead);
        if (t.empty()) continue;
        const int col0 = static_cast<int>(lead) + 1;

        if (t.front() == '[') {
            if (t.back() != ']')
                throw ScenarioError(ErrorKind::syntax, "unterminated section header", line_no, col0);
            const std::string_view name = trim(t.substr(1, t.size() - 2));
            current = nullptr;
            for (const auto& sec : sections())
                if (name == sec.name) current = &sec;
            if (!current)
                throw ScenarioError(ErrorKind::syntax, "unknown section [" + std::string(name) + "]",
                                    line_no, col0);
            seen.clear();
            if (std::string_view(current->name) == "region") s.regions.emplace_back();
            continue;
        }

        const std::size_t eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ScenarioError(ErrorKind::syntax, "expected 'key = value'", line_no, col0);
        const std::string_view key = trim(t.substr(0, eq));
        if (key.empty()) throw ScenarioError(ErrorKind::syntax, "missing key before '='", line_no, col0);
        if (!current)
            throw ScenarioError(ErrorKind::syntax, "key '" + std::string(key) + "' outside any section",
                                line_no, col0);
        const Key* k = find_key(current->keys(), key);
        if (!k)
            throw ScenarioError(ErrorKind::validation,
                                "unknown key '" + std::string(key) + "' in [" + current->name + "]",
                                line_no, col0);
        if (!k->repeatable && !seen.insert(std::string(key)).second)
            throw ScenarioError(ErrorKind::validation,
                                "duplicate key '" + std::string(key) + "' in [" + current->name + "]",
                                line_no, col0);
        const std::string_view value = t.substr(eq + 1);
        const int value_col = col0 + static_cast<int>(eq) + 1;
        try {
            k->parse(ctx, value);
        } catch (const ValueError& e) {
            throw ScenarioError(ErrorKind::syntax, std::string(current->name) + "." + std::string(key) +
                                                       ": " + e.message,
                                line_no, value_col + static_cast<int>(e.offset));
        }
    }

    std::vector<std::string> missing;
    for (const char* req : {"scenario.name", "scenario.frames", "scene.background"})
        if (!ctx.seen_required.count(req)) missing.emplace_back(req);
    if (!missing.empty()) {
        std::string m = "missing required keys:";
        for (const auto& r : missing) m += " " + r;
        throw ScenarioError(ErrorKind::validation, m);
    }

    s.normalize();
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(ErrorKind::io, path.string() + ": cannot open scenario");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

std::string print_scenario(const Scenario& s) {
    std::ostringstream os;
    auto emit = [&](const char* section, const std::vector<Key>& keys, std::size_t region) {
        os << "[" << section << "]\n";
        for (const auto& k : keys)
            if (const auto v = k.print(s, region)) os << k.name << " = " << *v << "\n";
    };
    emit("scenario", scenario_keys(), 0);
    os << "\n";
    emit("scene", scene_keys(), 0);
    for (std::size_t r = 0; r < s.regions.size(); ++r) {
        os << "\n";
        emit("region", region_keys(), r);
    }
    os << "\n";
    emit("sensor", sensor_keys(), 0);
    os << "\n";
    emit("adc", adc_keys(), 0);
    os << "\n";
    emit("controller", controller_keys(), 0);
    os << "\n";
    emit("loop", loop_keys(), 0);
    for (const auto& p : s.system.loop.probes) os << "probe = " << fmt(p) << "\n";
    std::string out = os.str();
    return out;
}

}  // namespace pxa::io
