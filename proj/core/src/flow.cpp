#include "tmhf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmhf/diagnostics.hpp"

namespace tmhf {

namespace {

constexpr double kMinHeight = 1e-6;
constexpr double kMaxHeight = 1e6;
constexpr double kEventTimeTol = 1e-10;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

FlowState advance(const FlowState& s, double h, const FlowVelocity& v) {
    return {s.t, s.z + h * v.z, s.a + h * v.a, s.b + h * v.b};
}

FlowVelocity combine(std::initializer_list<std::pair<double, const FlowVelocity*>> terms) {
    FlowVelocity out;
    for (const auto& [w, v] : terms) {
        out.z += w * v->z;
        out.a += w * v->a;
        out.b += w * v->b;
    }
    return out;
}

bool finite(const FlowState& s) {
    return std::isfinite(s.t) && std::isfinite(s.z) && std::isfinite(s.a) && std::isfinite(s.b);
}

// Raw DP step without the underflow check; used by event location.
StepResult dp_step(const FlowSystem& sys, const FlowState& y, double h, const Tolerances& tol) {
    if (!(y.b > 0.0)) return {y, std::numeric_limits<double>::infinity(), false};
    auto eval = [&](const FlowState& s) -> FlowVelocity {
        if (!(s.b > 0.0) || !finite(s)) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {nan, nan, nan};
        }
        return sys.velocity(s);
    };
    const FlowVelocity k1 = eval(y);
    const FlowVelocity k2 = eval(advance(y, h, combine({{a21, &k1}})));
    const FlowVelocity k3 = eval(advance(y, h, combine({{a31, &k1}, {a32, &k2}})));
    const FlowVelocity k4 = eval(advance(y, h, combine({{a41, &k1}, {a42, &k2}, {a43, &k3}})));
    const FlowVelocity k5 =
        eval(advance(y, h, combine({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}})));
    const FlowVelocity k6 = eval(
        advance(y, h, combine({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}})));
    FlowState next =
        advance(y, h, combine({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}));
    next.t = y.t + h;
    const FlowVelocity k7 = eval(next);
    const FlowVelocity err =
        combine({{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

    auto scaled = [&](double e, double y0, double y1) {
        const double sc = tol.abs_tol + tol.rel_tol * std::max(std::abs(y0), std::abs(y1));
        return h * e / sc;
    };
    const double ez = scaled(err.z, y.z, next.z);
    const double ea = scaled(err.a, y.a, next.a);
    const double eb = scaled(err.b, y.b, next.b);
    double norm = std::sqrt((ez * ez + ea * ea + eb * eb) / 3.0);
    if (!std::isfinite(norm) || !finite(next) || !(next.b > 0.0)) {
        norm = std::numeric_limits<double>::infinity();
    }
    return {next, norm, norm <= 1.0};
}

// Locates t in (t0, t1] with z(t) = level by bisection on the step map from y0.
FlowState locate_level(const FlowSystem& sys, const FlowState& y0, double t1, double level,
                       const Tolerances& tol) {
    double lo = y0.t;
    double hi = t1;
    const double sign0 = y0.z - level;
    for (int it = 0; it < 200 && hi - lo > kEventTimeTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double zm = dp_step(sys, y0, mid - y0.t, tol).state.z - level;
        if ((zm > 0.0) == (sign0 > 0.0) && zm != 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    FlowState s = dp_step(sys, y0, hi - y0.t, tol).state;
    s.t = hi;
    return s;
}

}  // namespace

void FlowConfig::check() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(eta)) throw DomainError("flow.eta must be positive");
    if (!positive(t_max)) throw DomainError("flow.t_max must be positive");
    if (!positive(rel_tol) || !positive(abs_tol)) throw DomainError("flow tolerances must be positive");
    if (!positive(min_step) || !positive(max_step) || min_step > max_step) {
        throw DomainError("flow step bounds must satisfy 0 < min_step <= max_step");
    }
    for (double o : level_offsets) {
        if (!(o >= 0.0 && o < 1.0)) throw DomainError("flow.level_offsets must lie in [0, 1)");
    }
    if (!(velocity_threshold >= 0.0)) throw DomainError("flow.velocity_threshold must be >= 0");
    if (record_cap < 2) throw DomainError("flow.record_cap must be >= 2");
}

double map_velocity(const CouplingProfile& profile, const ModuliCurve& curve, const FlowState& s) {
    const TeichPoint p{s.a, s.b};
    const TeichPoint g = curve_eval(curve, s.z);
    const CurveTangent dg = curve_deriv(curve, s.z);
    const EnergyGradient grad = identity_energy_grad(p, g);
    const double directional = grad.d_alpha * dg.d_alpha + grad.d_beta * dg.d_beta;
    return -f0_eval(profile, s.z) * directional - f0_deriv(profile, s.z) * identity_energy(p, g);
}

MetricVelocity metric_velocity(const CouplingProfile& profile, const ModuliCurve& curve,
                               const FlowState& s, double eta) {
    const TeichPoint p{s.a, s.b};
    const QuadDiffCoeff phi = hopf_coefficient(p, curve_eval(curve, s.z), f0_eval(profile, s.z));
    const FlatMetric target = hopf_real_part_tensor(phi, p);
    const FlatMetric g = metric_from_point(p);
    const FlatMetric ga = metric_partial_a(p);
    const FlatMetric gb = metric_partial_b(p);

    // Normal equations of (d_a g) da + (d_b g) db = (eta^2/4) Re Phi in the L^2 inner product.
    const double m11 = l2_inner(g, ga, ga);
    const double m12 = l2_inner(g, ga, gb);
    const double m22 = l2_inner(g, gb, gb);
    const double scale = 0.25 * eta * eta;
    const double r1 = scale * l2_inner(g, ga, target);
    const double r2 = scale * l2_inner(g, gb, target);
    const double det = m11 * m22 - m12 * m12;
    if (!(det > 0.0)) throw DomainError("metric_velocity: degenerate tangent frame");
    return {(m22 * r1 - m12 * r2) / det, (m11 * r2 - m12 * r1) / det};
}

double decay_rate(const CouplingProfile& profile, const ModuliCurve& curve, const FlowState& s,
                  double eta, double kappa) {
    const TeichPoint p{s.a, s.b};
    const double zdot = map_velocity(profile, curve, s);
    const QuadDiffCoeff phi = hopf_coefficient(p, curve_eval(curve, s.z), f0_eval(profile, s.z));
    return -zdot * zdot - (eta * eta / 32.0) * quad_diff_l2_norm_sq(phi, p, kappa);
}

FlowSystem::FlowSystem(CouplingProfile profile, ModuliCurve curve, double eta)
    : profile_(std::move(profile)), curve_(std::move(curve)), eta_(eta) {
    profile_.check();
    if (!(eta_ > 0.0)) throw DomainError("eta must be positive");
}

FlowVelocity FlowSystem::velocity(const FlowState& s) const {
    const MetricVelocity mv = metric_velocity(profile_, curve_, s, eta_);
    return {map_velocity(profile_, curve_, s), mv.a, mv.b};
}

double FlowSystem::energy(const FlowState& s) const {
    return potential_energy(profile_, curve_, s.z, {s.a, s.b});
}

double FlowSystem::energy_excess(const FlowState& s) const {
    return potential_energy_excess(profile_, curve_, s.z, {s.a, s.b});
}

QuadDiffCoeff FlowSystem::hopf(const FlowState& s) const {
    return hopf_coefficient({s.a, s.b}, curve_eval(curve_, s.z), f0_eval(profile_, s.z));
}

double FlowSystem::decay_rate(const FlowState& s, double kappa) const {
    return tmhf::decay_rate(profile_, curve_, s, eta_, kappa);
}

double FlowSystem::speed(const FlowState& s) const {
    const FlowVelocity v = velocity(s);
    const double metric = l2_metric_speed({s.a, s.b}, v.a, v.b);
    return std::sqrt(v.z * v.z + metric * metric);
}

TraceRecord FlowSystem::record(const FlowState& s) const {
    const TeichPoint p{s.a, s.b};
    const TeichPoint g = curve_eval(curve_, s.z);
    const double zdot = map_velocity(profile_, curve_, s);
    const QuadDiffCoeff phi = hopf_coefficient(p, g, f0_eval(profile_, s.z));
    const MetricVelocity mv = metric_velocity(profile_, curve_, s, eta_);
    const double metric = l2_metric_speed(p, mv.a, mv.b);

    TraceRecord r;
    r.t = s.t;
    r.z = s.z;
    r.a = s.a;
    r.b = s.b;
    r.energy_gap = potential_energy_excess(profile_, curve_, s.z, p);
    r.energy = 1.0 + r.energy_gap;
    r.tau_norm_sq = zdot * zdot;
    r.phi_norm_sq = quad_diff_l2_norm_sq(phi, p);
    r.decay_rate = -r.tau_norm_sq - (eta_ * eta_ / 32.0) * r.phi_norm_sq;
    r.wp_to_curve = wp_distance(p, g);
    r.inj_radius = injectivity_radius(p);
    const Winding w = winding_index(s.z);
    r.winding_index = w.n;
    r.reduced_z = w.reduced_z;
    r.speed = std::sqrt(r.tau_norm_sq + metric * metric);
    return r;
}

StepResult step(const FlowSystem& system, const FlowState& state, double h, const Tolerances& tol) {
    if (!(h >= tol.min_step)) {
        std::ostringstream os;
        os << "step size " << h << " below min_step " << tol.min_step << " at t = " << state.t;
        throw StepUnderflow(os.str(), state);
    }
    return dp_step(system, state, h, tol);
}

FlowState on_curve_initial_state(const ModuliCurve& curve, double z0) {
    const TeichPoint g = curve_eval(curve, z0);
    return {0.0, z0, g.a, g.b};
}

void thin_records(std::vector<TraceRecord>& records, std::size_t cap) {
    if (records.size() <= cap || cap < 2) return;
    const double t0 = records.front().t;
    const double t1 = records.back().t;
    std::vector<TraceRecord> kept;
    kept.reserve(cap);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < cap; ++i) {
        const double target = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(cap - 1);
        while (cursor + 1 < records.size() &&
               std::abs(records[cursor + 1].t - target) <= std::abs(records[cursor].t - target)) {
            ++cursor;
        }
        if (kept.empty() || records[cursor].t > kept.back().t) kept.push_back(records[cursor]);
    }
    if (kept.back().t < t1) kept.push_back(records.back());
    records = std::move(kept);
}

FlowTrace integrate(const CouplingProfile& profile, const ModuliCurve& curve,
                    const FlowConfig& config, const FlowState& initial) {
    config.check();
    const FlowSystem sys(profile, curve, config.eta);
    const Tolerances tol = config.tolerances();
    if (!finite(initial) || !(initial.b > 0.0)) throw DomainError("integrate: invalid initial state");

    FlowTrace trace;
    trace.eta = config.eta;
    FlowState y = initial;
    trace.records.push_back(sys.record(y));

    const double t_end = initial.t + config.t_max;
    double h = std::min(config.max_step, 1e-2);
    double err_prev = 1e-4;
    bool last_rejected = false;

    // PI step-size control, Hairer-Wanner constants.
    constexpr double beta = 0.04;
    constexpr double alpha = 0.2 - 0.75 * beta;
    constexpr double safety = 0.9;

    while (t_end - y.t > config.min_step) {
        h = std::min(h, t_end - y.t);
        StepResult res;
        try {
            res = step(sys, y, h, tol);
        } catch (const StepUnderflow&) {
            trace.status = TraceStatus::step_underflow;
            throw;
        }
        if (!res.accepted) {
            ++trace.rejected_steps;
            const double fac = std::isfinite(res.error)
                                   ? std::max(0.2, safety * std::pow(res.error, -alpha))
                                   : 0.2;
            h *= std::min(1.0, fac);
            last_rejected = true;
            continue;
        }
        ++trace.accepted_steps;

        // Level crossings z = z* + j inside (y.t, res.state.t].
        const FlowState& next = res.state;
        std::vector<TraceEvent> found;
        for (double offset : config.level_offsets) {
            const double lo = std::min(y.z, next.z) - offset;
            const double hi = std::max(y.z, next.z) - offset;
            for (auto j = static_cast<std::int64_t>(std::floor(lo)) + 1;
                 static_cast<double>(j) <= std::floor(hi); ++j) {
                const double level = offset + static_cast<double>(j);
                if (!(level > std::min(y.z, next.z) && level <= std::max(y.z, next.z))) continue;
                TraceEvent ev;
                ev.kind = EventKind::level_crossing;
                ev.j = j;
                ev.offset = offset;
                ev.value = level;
                ev.state = locate_level(sys, y, next.t, level, tol);
                ev.t = ev.state.t;
                found.push_back(ev);
            }
        }
        std::stable_sort(found.begin(), found.end(),
                         [](const TraceEvent& l, const TraceEvent& r) { return l.t < r.t; });
        for (const TraceEvent& ev : found) {
            if (ev.t > trace.records.back().t + 1e-12 && ev.t < next.t - 1e-12) {
                trace.records.push_back(sys.record(ev.state));
            }
            trace.events.push_back(ev);
        }

        y = next;
        if (!finite(y)) {
            trace.status = TraceStatus::non_finite;
            trace.message = "non-finite state encountered";
            break;
        }
        trace.records.push_back(sys.record(y));
        if (y.b < kMinHeight || y.b > kMaxHeight) {
            trace.status = TraceStatus::b_out_of_range;
            std::ostringstream os;
            os << "b = " << y.b << " left [" << kMinHeight << ", " << kMaxHeight
               << "] at t = " << y.t;
            trace.message = os.str();
            break;
        }

        const double err = std::max(res.error, 1e-10);
        double fac = safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
        fac = std::clamp(fac, 0.2, 5.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        h = std::min(config.max_step, h * fac);
        err_prev = std::max(res.error, 1e-4);
        last_rejected = false;
    }

    // Small-velocity times: strict local minima of the speed below the threshold.
    std::vector<TraceEvent> slow;
    const auto& rec = trace.records;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        const bool left = rec[k].speed < rec[k - 1].speed;
        const bool right = k + 1 == rec.size() || rec[k].speed <= rec[k + 1].speed;
        if (left && right && rec[k].speed < config.velocity_threshold) {
            TraceEvent ev;
            ev.kind = EventKind::small_velocity;
            ev.t = rec[k].t;
            ev.j = static_cast<std::int64_t>(slow.size());
            ev.value = rec[k].speed;
            ev.state = rec[k].state();
            slow.push_back(ev);
        }
    }
    trace.events.insert(trace.events.end(), slow.begin(), slow.end());
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const TraceEvent& l, const TraceEvent& r) { return l.t < r.t; });

    if (trace.records.size() > config.record_cap) {
        thin_records(trace.records, config.record_cap);
        trace.thinned = true;
    }
    return trace;
}

std::string to_string(EventKind kind) {
    return kind == EventKind::level_crossing ? "level_crossing" : "small_velocity";
}

std::string to_string(TraceStatus status) {
    switch (status) {
        case TraceStatus::completed: return "completed";
        case TraceStatus::b_out_of_range: return "b_out_of_range";
        case TraceStatus::non_finite: return "non_finite";
        case TraceStatus::step_underflow: return "step_underflow";
    }
    return "?";
}

}  // namespace tmhf
