#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmhf {

/// Reduced flow variables: map coordinate z = log y on the target line and
/// the Teichmüller point (a, b) of the domain metric.
struct FlowState {
    double t = 0.0;
    double z = 0.0;
    double a = 0.0;
    double b = 1.0;
};

/// One sampled state with its diagnostics. The first twelve fields are the
/// serialized trace columns; energy_gap and speed are kept in memory only.
struct TraceRecord {
    double t = 0.0;
    double z = 0.0;
    double a = 0.0;
    double b = 1.0;
    double energy = 1.0;
    double decay_rate = 0.0;
    double tau_norm_sq = 0.0;
    double phi_norm_sq = 0.0;
    double wp_to_curve = 0.0;
    double inj_radius = 0.0;
    std::int64_t winding_index = 0;
    double reduced_z = 0.0;

    double energy_gap = 0.0;  // energy - 1 without cancellation
    double speed = 0.0;       // L^2 norm of the full velocity (dz/dt, dg/dt)

    FlowState state() const { return {t, z, a, b}; }
};

enum class EventKind { level_crossing, small_velocity };

struct TraceEvent {
    EventKind kind = EventKind::level_crossing;
    double t = 0.0;
    std::int64_t j = 0;             // level index (crossings) or running count
    std::optional<double> offset;   // level offset z* in [0, 1); empty for small_velocity
    double value = 0.0;             // crossed level z* + j, or the velocity norm
    FlowState state;                // state at the event (not serialized)
};

enum class TraceStatus { completed, b_out_of_range, non_finite, step_underflow };

struct FlowTrace {
    double eta = 1.0;
    std::vector<TraceRecord> records;
    std::vector<TraceEvent> events;
    TraceStatus status = TraceStatus::completed;
    std::string message;
    std::int64_t accepted_steps = 0;
    std::int64_t rejected_steps = 0;
    bool thinned = false;
};

std::string to_string(EventKind kind);
std::string to_string(TraceStatus status);

}  // namespace tmhf
