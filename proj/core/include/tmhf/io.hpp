#pragma once

// Trace, event and report serialization.
//
// trace.csv    t,z,a,b,energy,decay_rate,tau_norm_sq,phi_norm_sq,wp_to_curve,
//              inj_radius,winding_index,reduced_z
// events.jsonl {"kind", "t", "j", "offset", "value"} per line; offset is null
//              for small_velocity events.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tmhf/trace.hpp"

namespace tmhf {

inline constexpr std::string_view kTraceHeader =
    "t,z,a,b,energy,decay_rate,tau_norm_sq,phi_norm_sq,wp_to_curve,inj_radius,winding_index,"
    "reduced_z";

/// RFC-4180 quoting: fields with commas, quotes or line breaks are quoted and
/// inner quotes doubled.
std::string csv_field(std::string_view text);
/// Splits one CSV line, honouring quoted fields.
std::vector<std::string> csv_split(std::string_view line);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& records);

/// Reads a trace back. energy_gap and speed are recomputed from the stored
/// columns, the latter using the flow coupling eta. Throws RangeError on
/// schema mismatch.
std::vector<TraceRecord> read_trace_csv(std::istream& in, double eta);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path, double eta);

void write_events_jsonl(std::ostream& out, const std::vector<TraceEvent>& events);
void write_events_jsonl(const std::filesystem::path& path, const std::vector<TraceEvent>& events);
/// Event states are filled in from the record nearest in t.
std::vector<TraceEvent> read_events_jsonl(std::istream& in, const std::vector<TraceRecord>& records);
std::vector<TraceEvent> read_events_jsonl(const std::filesystem::path& path,
                                          const std::vector<TraceRecord>& records);

/// Whole-file helpers.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace tmhf
