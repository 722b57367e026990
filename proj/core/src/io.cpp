#include "tmhf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmhf/config.hpp"
#include "tmhf/errors.hpp"

namespace tmhf {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw RangeError("trace line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records) {
    out << kTraceHeader << "\r\n";
    for (const TraceRecord& r : records) {
        out << format_double(r.t) << ',' << format_double(r.z) << ',' << format_double(r.a) << ','
            << format_double(r.b) << ',' << format_double(r.energy) << ','
            << format_double(r.decay_rate) << ',' << format_double(r.tau_norm_sq) << ','
            << format_double(r.phi_norm_sq) << ',' << format_double(r.wp_to_curve) << ','
            << format_double(r.inj_radius) << ',' << r.winding_index << ','
            << format_double(r.reduced_z) << "\r\n";
    }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
    auto out = open_out(path);
    write_trace_csv(out, records);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in, double eta) {
    std::string line;
    if (!std::getline(in, line)) throw RangeError("trace: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) throw RangeError("trace: unexpected header '" + line + "'");
    std::vector<TraceRecord> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != 12) {
            throw RangeError("trace line " + std::to_string(n) + ": expected 12 fields, got " +
                             std::to_string(f.size()));
        }
        TraceRecord r;
        r.t = parse_double(f[0], n);
        r.z = parse_double(f[1], n);
        r.a = parse_double(f[2], n);
        r.b = parse_double(f[3], n);
        r.energy = parse_double(f[4], n);
        r.decay_rate = parse_double(f[5], n);
        r.tau_norm_sq = parse_double(f[6], n);
        r.phi_norm_sq = parse_double(f[7], n);
        r.wp_to_curve = parse_double(f[8], n);
        r.inj_radius = parse_double(f[9], n);
        r.winding_index = static_cast<std::int64_t>(parse_double(f[10], n));
        r.reduced_z = parse_double(f[11], n);
        r.energy_gap = r.energy - 1.0;
        // |dg/dt|^2 = eta^4/16 |Re Phi|^2 = (eta^4/32) phi_norm_sq.
        r.speed = std::sqrt(r.tau_norm_sq + std::pow(eta, 4) / 32.0 * r.phi_norm_sq);
        out.push_back(r);
    }
    return out;
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path, double eta) {
    auto in = open_in(path);
    return read_trace_csv(in, eta);
}

void write_events_jsonl(std::ostream& out, const std::vector<TraceEvent>& events) {
    for (const TraceEvent& e : events) {
        nlohmann::ordered_json j;
        j["kind"] = to_string(e.kind);
        j["t"] = e.t;
        j["j"] = e.j;
        j["offset"] = e.offset ? nlohmann::ordered_json(*e.offset) : nlohmann::ordered_json(nullptr);
        j["value"] = e.value;
        out << j.dump() << "\n";
    }
}

void write_events_jsonl(const std::filesystem::path& path, const std::vector<TraceEvent>& events) {
    auto out = open_out(path);
    write_events_jsonl(out, events);
}

std::vector<TraceEvent> read_events_jsonl(std::istream& in, const std::vector<TraceRecord>& records) {
    std::vector<TraceEvent> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        TraceEvent e;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "level_crossing") {
            e.kind = EventKind::level_crossing;
        } else if (kind == "small_velocity") {
            e.kind = EventKind::small_velocity;
        } else {
            throw RangeError("events: unknown kind '" + kind + "'");
        }
        e.t = j.at("t").get<double>();
        e.j = j.at("j").get<std::int64_t>();
        if (!j.at("offset").is_null()) e.offset = j.at("offset").get<double>();
        e.value = j.at("value").get<double>();
        if (!records.empty()) {
            auto it = std::lower_bound(records.begin(), records.end(), e.t,
                                       [](const TraceRecord& r, double t) { return r.t < t; });
            if (it == records.end()) --it;
            if (it != records.begin() && std::abs((it - 1)->t - e.t) < std::abs(it->t - e.t)) --it;
            e.state = it->state();
        }
        out.push_back(e);
    }
    return out;
}

std::vector<TraceEvent> read_events_jsonl(const std::filesystem::path& path,
                                          const std::vector<TraceRecord>& records) {
    auto in = open_in(path);
    return read_events_jsonl(in, records);
}

std::string read_text(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    auto out = open_out(path);
    out << text;
}

}  // namespace tmhf
