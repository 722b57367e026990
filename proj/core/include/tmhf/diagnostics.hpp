#pragma once

// Post-processing of flow traces: winding index, pulled-back states, the
// Weil-Petersson tracking bound, L^2 path lengths, limit detection along
// level crossings and Lojasiewicz exponent estimation.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tmhf/moduli.hpp"
#include "tmhf/target.hpp"
#include "tmhf/trace.hpp"

namespace tmhf {

struct Winding {
    std::int64_t n = 0;
    double reduced_z = 0.0;  // z - n in [0, 1)
};

/// n = floor(z). Negative n is allowed for flows that go below z = 0.
Winding winding_index(double z);
inline Winding winding_index(const FlowState& s) { return winding_index(s.z); }

struct PulledBack {
    TeichPoint point;
    double reduced_z = 0.0;
    std::int64_t n = 0;
};

/// Applies deck^n to (a, b) and shifts z by -n, with n the winding index.
PulledBack pull_back(const ModuliCurve& curve, const FlowState& s);
/// Same with an explicit power n.
PulledBack pull_back(const ModuliCurve& curve, const FlowState& s, std::int64_t n);

struct TrackingResidual {
    double lhs = 0.0;  // d_WP(g, G_z)
    double rhs = 0.0;  // 2 sqrt(2) (E - 1)^(1/2)
    double slack() const { return rhs - lhs; }
};

TrackingResidual tracking_residual(const TraceRecord& record);

struct L2Length {
    double map_length = 0.0;
    double metric_length = 0.0;
    double total = 0.0;
};

/// Trapezoid rule over the recorded L^2 speeds on [t0, t1]. Throws RangeError
/// if the interval is not inside the trace.
L2Length l2_length(const FlowTrace& trace, double t0, double t1);

struct LimitSample {
    std::int64_t j = 0;
    double t = 0.0;
    TeichPoint pulled_back;
    double distance = 0.0;    // hyperbolic distance to G_{offset}
    double energy_gap = 0.0;  // E(t) - 1
};

struct OffsetLimit {
    double offset = 0.0;
    TeichPoint limit_point;  // G_{offset}
    std::vector<LimitSample> samples;
    bool converged = false;
    double final_distance = 0.0;
    bool monotone_tail = false;
    double fitted_rate = 0.0;  // slope of log(distance) against j
    std::string verdict;
};

struct LimitReport {
    bool applicable = false;
    std::string message;
    std::vector<OffsetLimit> offsets;
    double min_limit_separation = 0.0;  // smallest pairwise distance of limit points
    bool limits_distinct = false;
};

/// Pulled-back convergence at the level-crossing times z(t) = offset + j.
LimitReport limit_analysis(const ModuliCurve& curve, const FlowTrace& trace,
                           std::span<const double> offsets, double tolerance = 1e-2);

struct LojasiewiczFit {
    bool applicable = false;
    std::string verdict;
    double alpha_hat = 0.0;
    double slope = 0.0;      // d log(E - E_inf) / d log |grad E|
    double intercept = 0.0;
    double residual_rms = 0.0;
    double max_residual = 0.0;
    std::size_t points = 0;
    double energy_decades = 0.0;
    std::vector<double> log_grad;    // x samples used in the fit
    std::vector<double> log_energy;  // y samples used in the fit
};

/// Fits |E - E_inf| ~ |grad E|^slope over the last tail_fraction of records,
/// with E_inf the final energy; alpha = 1 - 1/slope. Refuses traces that do
/// not end at a critical point: final velocity norm above stationary_tol, or a
/// tail in which z moves by a full period.
LojasiewiczFit lojasiewicz_fit(const FlowTrace& trace, double tail_fraction, double abs_tol,
                               double stationary_tol = 1e-6);

/// Largest ratio of accumulated metric L^2 length to the integral of
/// sqrt(-dE/dt) over windows [t_k, t_end]; bounded above by eta.
double metric_length_constant(const FlowTrace& trace);

}  // namespace tmhf
