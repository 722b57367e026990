#include "tmhf/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "tmhf/errors.hpp"

namespace tmhf {

namespace {

struct Value {
    enum class Type { string, number, boolean, list } type = Type::number;
    std::string text;
    double number = 0.0;
    bool boolean = false;
    std::vector<double> list;
    int line = 0;
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

Value parse_value(std::string_view raw, int line, const std::string& key) {
    Value v;
    v.line = line;
    const std::string_view s = trim(raw);
    if (s.empty()) throw ConfigError("line " + std::to_string(line) + ": missing value for '" + key + "'", line, key);
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') {
            throw ConfigError("line " + std::to_string(line) + ": unterminated string for '" + key + "'", line, key);
        }
        v.type = Value::Type::string;
        v.text = std::string(s.substr(1, s.size() - 2));
        return v;
    }
    if (s == "true" || s == "false") {
        v.type = Value::Type::boolean;
        v.boolean = s == "true";
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']') {
            throw ConfigError("line " + std::to_string(line) + ": unterminated list for '" + key + "'", line, key);
        }
        v.type = Value::Type::list;
        std::string_view body = trim(s.substr(1, s.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            const std::string_view item = trim(body.substr(0, comma));
            double x = 0.0;
            if (!parse_number(item, x)) {
                throw ConfigError("line " + std::to_string(line) + ": bad list element '" +
                                      std::string(item) + "' for '" + key + "'",
                                  line, key);
            }
            v.list.push_back(x);
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
            if (body.empty()) {
                throw ConfigError("line " + std::to_string(line) + ": trailing comma in list for '" + key + "'", line, key);
            }
        }
        return v;
    }
    if (!parse_number(s, v.number)) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + std::string(s) +
                              "' for '" + key + "'",
                          line, key);
    }
    v.type = Value::Type::number;
    return v;
}

std::string strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

[[noreturn]] void type_error(const std::string& key, const Value& v, const char* expected) {
    throw ConfigError("line " + std::to_string(v.line) + ": '" + key + "' expects " + expected, v.line, key);
}

double as_number(const std::string& key, const Value& v) {
    if (v.type != Value::Type::number) type_error(key, v, "a number");
    return v.number;
}

std::int64_t as_integer(const std::string& key, const Value& v) {
    const double x = as_number(key, v);
    if (x != std::floor(x) || std::abs(x) > 9.0e15) type_error(key, v, "an integer");
    return static_cast<std::int64_t>(x);
}

std::string as_string(const std::string& key, const Value& v) {
    if (v.type != Value::Type::string) type_error(key, v, "a quoted string");
    return v.text;
}

bool as_bool(const std::string& key, const Value& v) {
    if (v.type != Value::Type::boolean) type_error(key, v, "true or false");
    return v.boolean;
}

std::vector<double> as_list(const std::string& key, const Value& v) {
    if (v.type != Value::Type::list) type_error(key, v, "a [list] of numbers");
    return v.list;
}

MappingClass default_deck(CurveKind kind) {
    return kind == CurveKind::dehn_twist ? MappingClass::translation(-1) : MappingClass::identity();
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string list_text(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_double(xs[i]);
    }
    return out + "]";
}

ScenarioConfig winding_base(std::string name) {
    ScenarioConfig c;
    c.scenario = std::move(name);
    c.profile.kind = ProfileKind::staircase;
    c.profile.width = 0.1;
    c.profile.tail = TailKind::power;
    c.profile.tail_exponent = 1.5;
    c.flow.eta = 1.0;
    c.flow.t_max = 6000.0;
    c.flow.rel_tol = 1e-10;
    c.flow.abs_tol = 1e-12;
    c.flow.min_step = 1e-12;
    c.flow.max_step = 10.0;
    c.flow.level_offsets = {0.0, 0.5};
    c.flow.velocity_threshold = 1e-6;
    c.initial.z0 = 0.0;
    c.analysis.tail_fraction = 0.5;
    c.analysis.limit_tolerance = 1e-2;
    c.output.dir = c.scenario;
    return c;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

FlowState ScenarioConfig::initial_state() const {
    if (initial.point) return {0.0, initial.z0, initial.point->a, initial.point->b};
    return on_curve_initial_state(curve, initial.z0);
}

std::vector<std::string> preset_names() {
    return {"winding-dehn", "winding-loop", "analytic-converging"};
}

ScenarioConfig preset(std::string_view name) {
    if (name == "custom") {
        ScenarioConfig c;
        c.curve = ModuliCurve::dehn_twist(1.0);
        c.output.dir = "custom";
        return c;
    }
    if (name == "winding-dehn") {
        ScenarioConfig c = winding_base("winding-dehn");
        c.curve = ModuliCurve::dehn_twist(1.0);
        return c;
    }
    if (name == "winding-loop") {
        ScenarioConfig c = winding_base("winding-loop");
        c.curve = ModuliCurve::closed_loop({0.0, 2.0}, 0.5);
        return c;
    }
    if (name == "analytic-converging") {
        ScenarioConfig c;
        c.scenario = "analytic-converging";
        // A closed loop of radius 0 is the constant curve G_s = G_0.
        c.curve = ModuliCurve::closed_loop({0.25, 1.5}, 0.0);
        c.profile.kind = ProfileKind::converging_well;
        c.profile.well_center = 0.0;
        c.flow.eta = 1.0;
        c.flow.t_max = 60.0;
        c.flow.rel_tol = 1e-12;
        c.flow.abs_tol = 1e-14;
        c.flow.min_step = 1e-12;
        c.flow.max_step = 0.25;
        c.flow.level_offsets = {};
        c.flow.velocity_threshold = 1e-6;
        c.initial.z0 = 1.5;
        c.initial.point = TeichPoint{-0.5, 2.5};
        c.analysis.tail_fraction = 0.75;
        c.analysis.limit_tolerance = 1e-2;
        c.output.dir = c.scenario;
        return c;
    }
    throw ConfigError("unknown scenario preset '" + std::string(name) + "'", 0, "scenario");
}

void validate_config(const ScenarioConfig& c) {
    auto fail = [](const std::string& key, const std::string& what) {
        throw ConfigError(key + ": " + what, 0, key);
    };
    try {
        c.profile.check();
    } catch (const DomainError& e) {
        fail("profile", e.what());
    }
    try {
        c.flow.check();
    } catch (const DomainError& e) {
        fail("flow", e.what());
    }
    const auto& cv = c.curve;
    switch (cv.kind) {
        case CurveKind::dehn_twist:
            if (!(cv.base_height > 0.0) || !std::isfinite(cv.base_a)) {
                fail("curve.base_height", "dehn_twist curve needs base_height > 0");
            }
            break;
        case CurveKind::closed_loop:
            if (!(cv.radius >= 0.0) || !(cv.center.b - cv.radius > 0.0)) {
                fail("curve.radius", "closed_loop curve needs radius >= 0 and center_b - radius > 0");
            }
            break;
        case CurveKind::spline:
            if (cv.control.size() < 3) fail("curve.control_a", "spline curve needs at least 3 control points");
            break;
    }
    if (!(c.analysis.tail_fraction > 0.0 && c.analysis.tail_fraction <= 1.0)) {
        fail("analysis.tail_fraction", "must lie in (0, 1]");
    }
    if (!(c.analysis.limit_tolerance > 0.0)) fail("analysis.limit_tolerance", "must be positive");
    if (c.output.dir.empty()) fail("output.dir", "must not be empty");
    if (!std::isfinite(c.initial.z0)) fail("initial.z0", "must be finite");
}

ScenarioConfig parse_config(std::string_view text) {
    std::map<std::string, Value> values;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip_comment(raw);
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        }
        const std::string key{trim(body.substr(0, eq))};
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key", line_no);
        if (values.contains(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no, key);
        }
        values.emplace(key, parse_value(body.substr(eq + 1), line_no, key));
    }

    std::string scenario = "custom";
    if (auto it = values.find("scenario"); it != values.end()) scenario = as_string("scenario", it->second);
    ScenarioConfig c;
    try {
        c = preset(scenario);
    } catch (const ConfigError&) {
        const int ln = values.contains("scenario") ? values.at("scenario").line : 0;
        throw ConfigError("line " + std::to_string(ln) + ": unknown scenario preset '" + scenario + "'", ln, "scenario");
    }

    bool deck_given = false;
    bool kind_changed = false;
    std::vector<double> control_a, control_b;
    bool control_given = false;
    std::optional<double> a0, b0;
    std::optional<bool> on_curve;

    using Setter = std::function<void(const std::string&, const Value&)>;
    const std::map<std::string, Setter> setters = {
        {"scenario", [](const std::string&, const Value&) {}},
        {"seed", [&](auto& k, auto& v) {
             const auto s = as_integer(k, v);
             if (s < 0) type_error(k, v, "a non-negative integer");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"curve.kind", [&](auto& k, auto& v) {
             try {
                 const CurveKind kind = curve_kind_from_string(as_string(k, v));
                 kind_changed = kind != c.curve.kind;
                 c.curve.kind = kind;
             } catch (const DomainError& e) {
                 throw ConfigError("line " + std::to_string(v.line) + ": " + e.what(), v.line, k);
             }
         }},
        {"curve.base_a", [&](auto& k, auto& v) { c.curve.base_a = as_number(k, v); }},
        {"curve.base_height", [&](auto& k, auto& v) { c.curve.base_height = as_number(k, v); }},
        {"curve.center_a", [&](auto& k, auto& v) { c.curve.center.a = as_number(k, v); }},
        {"curve.center_b", [&](auto& k, auto& v) {
             const double b = as_number(k, v);
             if (!(b > 0.0)) type_error(k, v, "a positive number");
             c.curve.center.b = b;
         }},
        {"curve.radius", [&](auto& k, auto& v) { c.curve.radius = as_number(k, v); }},
        {"curve.control_a", [&](auto& k, auto& v) { control_a = as_list(k, v); control_given = true; }},
        {"curve.control_b", [&](auto& k, auto& v) { control_b = as_list(k, v); control_given = true; }},
        {"curve.deck", [&](auto& k, auto& v) {
             const auto xs = as_list(k, v);
             if (xs.size() != 4) type_error(k, v, "a list of 4 integers [p, q, r, s]");
             std::array<std::int64_t, 4> m{};
             for (std::size_t i = 0; i < 4; ++i) {
                 if (xs[i] != std::floor(xs[i])) type_error(k, v, "a list of 4 integers [p, q, r, s]");
                 m[i] = static_cast<std::int64_t>(xs[i]);
             }
             try {
                 c.curve.deck = MappingClass(m[0], m[1], m[2], m[3]);
             } catch (const DomainError& e) {
                 throw ConfigError("line " + std::to_string(v.line) + ": curve.deck: " + e.what(), v.line, k);
             }
             deck_given = true;
         }},
        {"profile.kind", [&](auto& k, auto& v) {
             try {
                 c.profile.kind = profile_kind_from_string(as_string(k, v));
             } catch (const DomainError& e) {
                 throw ConfigError("line " + std::to_string(v.line) + ": " + e.what(), v.line, k);
             }
         }},
        {"profile.width", [&](auto& k, auto& v) { c.profile.width = as_number(k, v); }},
        {"profile.tail", [&](auto& k, auto& v) {
             try {
                 c.profile.tail = tail_kind_from_string(as_string(k, v));
             } catch (const DomainError& e) {
                 throw ConfigError("line " + std::to_string(v.line) + ": " + e.what(), v.line, k);
             }
         }},
        {"profile.tail_exponent", [&](auto& k, auto& v) { c.profile.tail_exponent = as_number(k, v); }},
        {"profile.well_center", [&](auto& k, auto& v) { c.profile.well_center = as_number(k, v); }},
        {"flow.eta", [&](auto& k, auto& v) { c.flow.eta = as_number(k, v); }},
        {"flow.t_max", [&](auto& k, auto& v) { c.flow.t_max = as_number(k, v); }},
        {"flow.rel_tol", [&](auto& k, auto& v) { c.flow.rel_tol = as_number(k, v); }},
        {"flow.abs_tol", [&](auto& k, auto& v) { c.flow.abs_tol = as_number(k, v); }},
        {"flow.min_step", [&](auto& k, auto& v) { c.flow.min_step = as_number(k, v); }},
        {"flow.max_step", [&](auto& k, auto& v) { c.flow.max_step = as_number(k, v); }},
        {"flow.level_offsets", [&](auto& k, auto& v) { c.flow.level_offsets = as_list(k, v); }},
        {"flow.velocity_threshold", [&](auto& k, auto& v) { c.flow.velocity_threshold = as_number(k, v); }},
        {"flow.record_cap", [&](auto& k, auto& v) {
             const auto n = as_integer(k, v);
             if (n < 2) type_error(k, v, "an integer >= 2");
             c.flow.record_cap = static_cast<std::size_t>(n);
         }},
        {"initial.z0", [&](auto& k, auto& v) { c.initial.z0 = as_number(k, v); }},
        {"initial.on_curve", [&](auto& k, auto& v) { on_curve = as_bool(k, v); }},
        {"initial.a0", [&](auto& k, auto& v) { a0 = as_number(k, v); }},
        {"initial.b0", [&](auto& k, auto& v) { b0 = as_number(k, v); }},
        {"analysis.tail_fraction", [&](auto& k, auto& v) { c.analysis.tail_fraction = as_number(k, v); }},
        {"analysis.limit_tolerance", [&](auto& k, auto& v) { c.analysis.limit_tolerance = as_number(k, v); }},
        {"output.dir", [&](auto& k, auto& v) { c.output.dir = as_string(k, v); }},
        {"output.plots", [&](auto& k, auto& v) { c.output.plots = as_bool(k, v); }},
    };

    // Apply curve.kind before the other curve fields so kind defaults do not clobber them.
    if (auto it = values.find("curve.kind"); it != values.end()) setters.at("curve.kind")(it->first, it->second);
    for (const auto& [key, value] : values) {
        const auto setter = setters.find(key);
        if (setter == setters.end()) {
            throw ConfigError("line " + std::to_string(value.line) + ": unknown key '" + key + "'", value.line, key);
        }
        if (key != "curve.kind") setter->second(key, value);
    }

    if (kind_changed && !deck_given) c.curve.deck = default_deck(c.curve.kind);
    if (control_given) {
        if (control_a.size() != control_b.size()) {
            throw ConfigError("curve.control_a and curve.control_b must have equal length", 0, "curve.control_a");
        }
        c.curve.control.clear();
        for (std::size_t i = 0; i < control_a.size(); ++i) {
            if (!(control_b[i] > 0.0)) {
                throw ConfigError("curve.control_b: control points must lie in the upper half-plane", 0, "curve.control_b");
            }
            c.curve.control.emplace_back(control_a[i], control_b[i]);
        }
    }
    if (a0.has_value() != b0.has_value()) {
        throw ConfigError("initial.a0 and initial.b0 must be given together", 0, a0 ? "initial.b0" : "initial.a0");
    }
    if (a0 && on_curve.value_or(false)) {
        throw ConfigError("initial.on_curve = true conflicts with initial.a0/b0", 0, "initial.on_curve");
    }
    if (a0) {
        if (!(*b0 > 0.0)) throw ConfigError("initial.b0 must be positive", 0, "initial.b0");
        c.initial.point = TeichPoint{*a0, *b0};
    } else if (on_curve) {
        if (*on_curve) {
            c.initial.point.reset();
        } else if (!c.initial.point) {
            throw ConfigError("initial.on_curve = false needs initial.a0 and initial.b0", 0,
                              "initial.on_curve");
        }
    }
    validate_config(c);
    return c;
}

std::string serialize_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "scenario = " << quote(c.scenario) << "\n";
    os << "seed = " << c.seed << "\n";
    os << "curve.kind = " << quote(std::string(to_string(c.curve.kind))) << "\n";
    os << "curve.base_a = " << format_double(c.curve.base_a) << "\n";
    os << "curve.base_height = " << format_double(c.curve.base_height) << "\n";
    os << "curve.center_a = " << format_double(c.curve.center.a) << "\n";
    os << "curve.center_b = " << format_double(c.curve.center.b) << "\n";
    os << "curve.radius = " << format_double(c.curve.radius) << "\n";
    std::vector<double> ca, cb;
    for (const TeichPoint& p : c.curve.control) {
        ca.push_back(p.a);
        cb.push_back(p.b);
    }
    os << "curve.control_a = " << list_text(ca) << "\n";
    os << "curve.control_b = " << list_text(cb) << "\n";
    const auto d = c.curve.deck.entries();
    os << "curve.deck = [" << d[0] << ", " << d[1] << ", " << d[2] << ", " << d[3] << "]\n";
    os << "profile.kind = " << quote(std::string(to_string(c.profile.kind))) << "\n";
    os << "profile.width = " << format_double(c.profile.width) << "\n";
    os << "profile.tail = " << quote(std::string(to_string(c.profile.tail))) << "\n";
    os << "profile.tail_exponent = " << format_double(c.profile.tail_exponent) << "\n";
    os << "profile.well_center = " << format_double(c.profile.well_center) << "\n";
    os << "flow.eta = " << format_double(c.flow.eta) << "\n";
    os << "flow.t_max = " << format_double(c.flow.t_max) << "\n";
    os << "flow.rel_tol = " << format_double(c.flow.rel_tol) << "\n";
    os << "flow.abs_tol = " << format_double(c.flow.abs_tol) << "\n";
    os << "flow.min_step = " << format_double(c.flow.min_step) << "\n";
    os << "flow.max_step = " << format_double(c.flow.max_step) << "\n";
    os << "flow.level_offsets = " << list_text(c.flow.level_offsets) << "\n";
    os << "flow.velocity_threshold = " << format_double(c.flow.velocity_threshold) << "\n";
    os << "flow.record_cap = " << c.flow.record_cap << "\n";
    os << "initial.z0 = " << format_double(c.initial.z0) << "\n";
    os << "initial.on_curve = " << (c.initial.point ? "false" : "true") << "\n";
    if (c.initial.point) {
        os << "initial.a0 = " << format_double(c.initial.point->a) << "\n";
        os << "initial.b0 = " << format_double(c.initial.point->b) << "\n";
    }
    os << "analysis.tail_fraction = " << format_double(c.analysis.tail_fraction) << "\n";
    os << "analysis.limit_tolerance = " << format_double(c.analysis.limit_tolerance) << "\n";
    os << "output.dir = " << quote(c.output.dir) << "\n";
    os << "output.plots = " << (c.output.plots ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace tmhf
