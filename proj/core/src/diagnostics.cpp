#include "tmhf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace tmhf {

namespace {

double metric_speed(const TraceRecord& r) {
    return std::sqrt(std::max(0.0, r.speed * r.speed - r.tau_norm_sq));
}

// Linear interpolation of a speed sampled at records[i-1], records[i].
template <typename F>
double interp(const TraceRecord& l, const TraceRecord& r, double t, F f) {
    if (r.t == l.t) return f(r);
    const double w = (t - l.t) / (r.t - l.t);
    return (1.0 - w) * f(l) + w * f(r);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    double max_abs = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double res = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += res * res;
        fit.max_abs = std::max(fit.max_abs, std::abs(res));
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace

Winding winding_index(double z) {
    const double n = std::floor(z);
    double reduced = z - n;
    if (reduced >= 1.0) reduced = 0.0;  // guards z - floor(z) rounding up to 1
    return {static_cast<std::int64_t>(n), reduced};
}

PulledBack pull_back(const ModuliCurve& curve, const FlowState& s, std::int64_t n) {
    const TeichPoint p = mapping_class_apply(curve.deck.pow(n), {s.a, s.b});
    return {p, s.z - static_cast<double>(n), n};
}

PulledBack pull_back(const ModuliCurve& curve, const FlowState& s) {
    const Winding w = winding_index(s.z);
    PulledBack out = pull_back(curve, s, w.n);
    out.reduced_z = w.reduced_z;
    return out;
}

TrackingResidual tracking_residual(const TraceRecord& record) {
    return {record.wp_to_curve, 2.0 * std::numbers::sqrt2 * std::sqrt(std::max(0.0, record.energy_gap))};
}

L2Length l2_length(const FlowTrace& trace, double t0, double t1) {
    const auto& rec = trace.records;
    if (rec.empty() || t0 > t1 || t0 < rec.front().t || t1 > rec.back().t) {
        std::ostringstream os;
        os << "l2_length: interval [" << t0 << ", " << t1 << "] outside trace span";
        throw RangeError(os.str());
    }
    auto map_speed = [](const TraceRecord& r) { return std::sqrt(r.tau_norm_sq); };
    auto met_speed = [](const TraceRecord& r) { return metric_speed(r); };
    auto tot_speed = [](const TraceRecord& r) { return r.speed; };

    L2Length out;
    auto accumulate = [&](double ta, double tb, double ma, double mb, double ga, double gb,
                          double sa, double sb) {
        const double dt = tb - ta;
        out.map_length += 0.5 * dt * (ma + mb);
        out.metric_length += 0.5 * dt * (ga + gb);
        out.total += 0.5 * dt * (sa + sb);
    };

    auto first = std::upper_bound(rec.begin(), rec.end(), t0,
                                  [](double t, const TraceRecord& r) { return t < r.t; });
    double prev_t = t0;
    double pm = 0, pg = 0, ps = 0;
    if (first == rec.begin()) {
        pm = map_speed(rec.front());
        pg = met_speed(rec.front());
        ps = tot_speed(rec.front());
    } else {
        const TraceRecord& l = *(first - 1);
        const TraceRecord& r = first == rec.end() ? l : *first;
        pm = interp(l, r, t0, map_speed);
        pg = interp(l, r, t0, met_speed);
        ps = interp(l, r, t0, tot_speed);
    }
    for (auto it = first; it != rec.end() && it->t <= t1; ++it) {
        const double m = map_speed(*it), g = met_speed(*it), s = tot_speed(*it);
        accumulate(prev_t, it->t, pm, m, pg, g, ps, s);
        prev_t = it->t;
        pm = m;
        pg = g;
        ps = s;
    }
    if (prev_t < t1) {
        auto right = std::lower_bound(rec.begin(), rec.end(), t1,
                                      [](const TraceRecord& r, double t) { return r.t < t; });
        const TraceRecord& r = *right;
        const TraceRecord& l = right == rec.begin() ? r : *(right - 1);
        accumulate(prev_t, t1, pm, interp(l, r, t1, map_speed), pg, interp(l, r, t1, met_speed),
                   ps, interp(l, r, t1, tot_speed));
    }
    return out;
}

LimitReport limit_analysis(const ModuliCurve& curve, const FlowTrace& trace,
                           std::span<const double> offsets, double tolerance) {
    LimitReport report;
    const auto& rec = trace.records;
    auto gap_at = [&](double t) {
        if (rec.empty()) return std::numeric_limits<double>::quiet_NaN();
        auto it = std::lower_bound(rec.begin(), rec.end(), t,
                                   [](const TraceRecord& r, double tt) { return r.t < tt; });
        if (it == rec.end()) return rec.back().energy_gap;
        if (it != rec.begin() && std::abs((it - 1)->t - t) < std::abs(it->t - t)) --it;
        return it->energy_gap;
    };

    bool any_sufficient = false;
    std::ostringstream msg;
    for (double offset : offsets) {
        OffsetLimit lim;
        lim.offset = offset;
        lim.limit_point = curve_eval(curve, offset);

        std::map<std::int64_t, const TraceEvent*> latest;
        for (const TraceEvent& ev : trace.events) {
            if (ev.kind != EventKind::level_crossing || !ev.offset) continue;
            if (std::abs(*ev.offset - offset) > 1e-12) continue;
            latest[ev.j] = &ev;  // the last crossing of each level wins
        }
        for (const auto& [j, ev] : latest) {
            LimitSample s;
            s.j = j;
            s.t = ev->t;
            s.pulled_back = pull_back(curve, ev->state, j).point;
            s.distance = hyperbolic_distance(s.pulled_back, lim.limit_point);
            s.energy_gap = gap_at(ev->t);
            lim.samples.push_back(s);
        }

        const std::size_t n = lim.samples.size();
        if (n < 3) {
            lim.verdict = "insufficient crossings";
            msg << "offset " << offset << ": " << n << " crossings (need 3); ";
        } else {
            any_sufficient = true;
            const auto& sm = lim.samples;
            lim.final_distance = sm[n - 1].distance;
            lim.monotone_tail = sm[n - 3].distance > sm[n - 2].distance &&
                                sm[n - 2].distance > sm[n - 1].distance;
            lim.converged = lim.final_distance < tolerance && lim.monotone_tail;
            lim.verdict = lim.converged ? "converged" : "not converged";
            std::vector<double> x, y;
            for (const LimitSample& s : sm) {
                if (s.distance > 0.0) {
                    x.push_back(static_cast<double>(s.j));
                    y.push_back(std::log(s.distance));
                }
            }
            if (x.size() >= 2) lim.fitted_rate = least_squares(x, y).slope;
        }
        report.offsets.push_back(std::move(lim));
    }

    report.applicable = any_sufficient;
    if (offsets.empty()) {
        report.message = "not applicable: no level offsets configured";
    } else if (!any_sufficient) {
        report.message = "not applicable: " + msg.str();
    } else {
        report.message = msg.str();
    }
    report.min_limit_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.offsets.size(); ++i) {
        for (std::size_t k = i + 1; k < report.offsets.size(); ++k) {
            report.min_limit_separation =
                std::min(report.min_limit_separation,
                         hyperbolic_distance(report.offsets[i].limit_point,
                                             report.offsets[k].limit_point));
        }
    }
    if (report.offsets.size() < 2) report.min_limit_separation = 0.0;
    report.limits_distinct = report.offsets.size() >= 2 && report.min_limit_separation > 0.0;
    return report;
}

LojasiewiczFit lojasiewicz_fit(const FlowTrace& trace, double tail_fraction, double abs_tol,
                               double stationary_tol) {
    LojasiewiczFit fit;
    const auto& rec = trace.records;
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw DomainError("lojasiewicz_fit: tail_fraction must lie in (0, 1]");
    }
    if (rec.size() < 2) {
        fit.verdict = "not applicable: trace too short";
        return fit;
    }
    const auto start = static_cast<std::size_t>(
        std::floor(static_cast<double>(rec.size()) * (1.0 - tail_fraction)));
    const double e_inf = rec.back().energy_gap;

    double zmin = rec[start].z, zmax = rec[start].z;
    for (std::size_t i = start; i < rec.size(); ++i) {
        zmin = std::min(zmin, rec[i].z);
        zmax = std::max(zmax, rec[i].z);
    }
    if (zmax - zmin >= 1.0) {
        fit.verdict = "not applicable: map component winds through the tail (no limit point)";
        return fit;
    }
    if (rec.back().speed > stationary_tol) {
        std::ostringstream os;
        os << "not applicable: final velocity norm " << rec.back().speed << " exceeds " << stationary_tol
           << " (trace does not end at a critical point)";
        fit.verdict = os.str();
        return fit;
    }

    double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
    for (std::size_t i = start; i < rec.size(); ++i) {
        const double de = rec[i].energy_gap - e_inf;
        const double grad = std::sqrt(rec[i].tau_norm_sq + rec[i].phi_norm_sq);
        if (!(de > 10.0 * abs_tol) || !(grad > 0.0)) continue;
        fit.log_grad.push_back(std::log(grad));
        fit.log_energy.push_back(std::log(de));
        emin = std::min(emin, de);
        emax = std::max(emax, de);
    }
    fit.points = fit.log_grad.size();
    if (fit.points < 20) {
        fit.verdict = "not applicable: fewer than 20 tail records above the noise floor";
        return fit;
    }
    fit.energy_decades = std::log10(emax / emin);
    if (fit.energy_decades < 1.0) {
        fit.verdict = "degenerate: energy gap spans less than one decade";
        return fit;
    }
    const LineFit lf = least_squares(fit.log_grad, fit.log_energy);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.residual_rms = lf.rms;
    fit.max_residual = lf.max_abs;
    if (!(lf.slope > 0.0)) {
        fit.verdict = "degenerate: non-positive slope";
        return fit;
    }
    fit.alpha_hat = 1.0 - 1.0 / lf.slope;
    fit.applicable = true;
    fit.verdict = "fitted";
    return fit;
}

double metric_length_constant(const FlowTrace& trace) {
    const auto& rec = trace.records;
    if (rec.size() < 2) return 0.0;
    // Suffix integrals of |dg/dt| and sqrt(-dE/dt).
    double length = 0.0, budget = 0.0, worst = 0.0;
    for (std::size_t k = rec.size() - 1; k-- > 0;) {
        const double dt = rec[k + 1].t - rec[k].t;
        length += 0.5 * dt * (metric_speed(rec[k]) + metric_speed(rec[k + 1]));
        budget += 0.5 * dt *
                  (std::sqrt(std::max(0.0, -rec[k].decay_rate)) +
                   std::sqrt(std::max(0.0, -rec[k + 1].decay_rate)));
        if (budget > 0.0) worst = std::max(worst, length / budget);
    }
    return worst;
}

}  // namespace tmhf
