#include "tmhf/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace tmhf {

namespace {

std::int64_t floor_div(std::int64_t i, std::int64_t m) {
    std::int64_t q = i / m;
    if ((i % m != 0) && ((i < 0) != (m < 0))) --q;
    return q;
}

TeichPoint spline_knot(const ModuliCurve& c, std::int64_t i) {
    const auto m = static_cast<std::int64_t>(c.control.size()) - 1;
    if (i >= 0 && i <= m) return c.control[static_cast<std::size_t>(i)];
    const std::int64_t n = floor_div(i, m);
    const std::int64_t base = i - n * m;
    return mapping_class_apply(c.deck.pow(-n), c.control[static_cast<std::size_t>(base)]);
}

struct SplineSegment {
    TeichPoint p0, p1, p2, p3;
    double u;
    double m;
};

SplineSegment locate(const ModuliCurve& c, double s) {
    if (c.control.size() < 3) throw DomainError("spline curve needs at least 3 control points");
    const double m = static_cast<double>(c.control.size() - 1);
    const double x = s * m;
    const double k = std::floor(x);
    const auto ki = static_cast<std::int64_t>(k);
    return {spline_knot(c, ki - 1), spline_knot(c, ki), spline_knot(c, ki + 1),
            spline_knot(c, ki + 2), x - k, m};
}

double catmull_rom(double p0, double p1, double p2, double p3, double u) {
    return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

double catmull_rom_du(double p0, double p1, double p2, double p3, double u) {
    return 0.5 * ((-p0 + p2) + 2.0 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u +
                  3.0 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u);
}

// Smooth step sigma(t) = B(t) / (B(t) + B(1 - t)), B(t) = exp(-1/t) for t > 0.
double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double l = bump(t);
    const double r = bump(1.0 - t);
    return l / (l + r);
}

double smooth_step_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double l = bump(t);
    const double r = bump(1.0 - t);
    const double dl = l / (t * t);
    const double dr = r / ((1.0 - t) * (1.0 - t));
    const double den = l + r;
    return (dl * r + l * dr) / (den * den);
}

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }
double logistic(double u) {
    return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

// H(u) = h(e^u), the excess of the coupling over 1 as a function of log of its argument.
double tail_excess(const CouplingProfile& pr, double u) {
    if (pr.kind == ProfileKind::converging_well) {
        const double d = u - pr.well_center;
        return d * d / (1.0 + d * d);
    }
    if (pr.tail == TailKind::exponential) return std::exp(-std::exp(u));
    return std::exp(-pr.tail_exponent * softplus(u));
}

double tail_excess_deriv(const CouplingProfile& pr, double u) {
    if (pr.kind == ProfileKind::converging_well) {
        const double d = u - pr.well_center;
        const double q = 1.0 + d * d;
        return 2.0 * d / (q * q);
    }
    if (pr.tail == TailKind::exponential) {
        const double e = std::exp(u);
        return -e * std::exp(-e);
    }
    return -pr.tail_exponent * logistic(u) * std::exp(-pr.tail_exponent * softplus(u));
}

// Limit of H(u) as u -> +infinity.
double tail_limit(const CouplingProfile& pr) {
    return pr.kind == ProfileKind::converging_well ? 1.0 : 0.0;
}

}  // namespace

ModuliCurve ModuliCurve::dehn_twist(double base_height, double base_a) {
    if (!(base_height > 0.0)) throw DomainError("dehn_twist curve needs base height > 0");
    ModuliCurve c;
    c.kind = CurveKind::dehn_twist;
    c.base_height = base_height;
    c.base_a = base_a;
    c.deck = MappingClass::translation(-1);
    return c;
}

ModuliCurve ModuliCurve::closed_loop(TeichPoint center, double radius) {
    if (!(radius >= 0.0) || !(center.b - radius > 0.0)) {
        throw DomainError("closed_loop curve must satisfy radius >= 0 and center.b - radius > 0");
    }
    ModuliCurve c;
    c.kind = CurveKind::closed_loop;
    c.center = center;
    c.radius = radius;
    c.deck = MappingClass::identity();
    return c;
}

ModuliCurve ModuliCurve::spline(std::vector<TeichPoint> control, MappingClass deck) {
    if (control.size() < 3) throw DomainError("spline curve needs at least 3 control points");
    ModuliCurve c;
    c.kind = CurveKind::spline;
    c.control = std::move(control);
    c.deck = deck;
    return c;
}

TeichPoint curve_eval(const ModuliCurve& curve, double s) {
    switch (curve.kind) {
        case CurveKind::dehn_twist:
            return {curve.base_a + s, curve.base_height};
        case CurveKind::closed_loop: {
            const double angle = 2.0 * std::numbers::pi * s;
            return {curve.center.a + curve.radius * std::cos(angle),
                    curve.center.b + curve.radius * std::sin(angle)};
        }
        case CurveKind::spline: {
            const SplineSegment g = locate(curve, s);
            const double a = catmull_rom(g.p0.a, g.p1.a, g.p2.a, g.p3.a, g.u);
            const double b = catmull_rom(g.p0.b, g.p1.b, g.p2.b, g.p3.b, g.u);
            if (!(b > 0.0)) {
                std::ostringstream os;
                os << "spline curve leaves the upper half-plane at s = " << s;
                throw DomainError(os.str());
            }
            return {a, b};
        }
    }
    return {};
}

CurveTangent curve_deriv(const ModuliCurve& curve, double s) {
    switch (curve.kind) {
        case CurveKind::dehn_twist:
            return {1.0, 0.0};
        case CurveKind::closed_loop: {
            const double angle = 2.0 * std::numbers::pi * s;
            const double w = 2.0 * std::numbers::pi * curve.radius;
            return {-w * std::sin(angle), w * std::cos(angle)};
        }
        case CurveKind::spline: {
            const SplineSegment g = locate(curve, s);
            return {g.m * catmull_rom_du(g.p0.a, g.p1.a, g.p2.a, g.p3.a, g.u),
                    g.m * catmull_rom_du(g.p0.b, g.p1.b, g.p2.b, g.p3.b, g.u)};
        }
    }
    return {};
}

CurveValidation validate_curve(const ModuliCurve& curve, int grid_size, double b_min, double tol) {
    if (grid_size < 2) throw DomainError("validate_curve: grid_size must be >= 2");
    CurveValidation report;
    report.min_height = std::numeric_limits<double>::infinity();
    const MappingClass back = curve.deck.inverse();
    for (int k = 0; k < grid_size; ++k) {
        const double s = static_cast<double>(k) / grid_size;
        TeichPoint here, next;
        try {
            here = curve_eval(curve, s);
            next = curve_eval(curve, s + 1.0);
        } catch (const DomainError& e) {
            report.passed = false;
            report.messages.emplace_back(e.what());
            report.min_height = 0.0;
            report.where_s = s;
            return report;
        }
        report.min_height = std::min({report.min_height, here.b, next.b});
        const double v = hyperbolic_distance(next, mapping_class_apply(back, here));
        if (v > report.max_periodicity_violation) {
            report.max_periodicity_violation = v;
            report.where_s = s;
        }
    }
    if (report.max_periodicity_violation > tol) {
        report.passed = false;
        std::ostringstream os;
        os << "periodicity G(s+1) = deck^-1 G(s) violated by " << report.max_periodicity_violation
           << " at s = " << report.where_s;
        report.messages.push_back(os.str());
    }
    if (report.min_height < b_min) {
        report.passed = false;
        std::ostringstream os;
        os << "curve height " << report.min_height << " below b_min = " << b_min;
        report.messages.push_back(os.str());
    }
    return report;
}

void CouplingProfile::check() const {
    if (!(width > 0.0 && width < 0.5)) throw DomainError("profile width must lie in (0, 1/2)");
    if (!(tail_exponent > 0.0) || !std::isfinite(tail_exponent)) {
        throw DomainError("profile tail exponent must be positive");
    }
    if (!std::isfinite(well_center)) throw DomainError("profile well center must be finite");
}

double rho_eval(const CouplingProfile& profile, double s) {
    if (profile.kind != ProfileKind::staircase) return s;
    const double n = std::floor(s);
    return n + smooth_step((s - n - profile.width) / (1.0 - 2.0 * profile.width));
}

double rho_deriv(const CouplingProfile& profile, double s) {
    if (profile.kind != ProfileKind::staircase) return 1.0;
    const double n = std::floor(s);
    const double scale = 1.0 / (1.0 - 2.0 * profile.width);
    return scale * smooth_step_deriv((s - n - profile.width) * scale);
}

double f_eval(const CouplingProfile& profile, double x, double y) {
    if (!(y > 0.0)) throw DomainError("f_eval requires y > 0");
    if (x <= 0.0) return 1.0 + tail_limit(profile);
    return 1.0 + tail_excess(profile, std::log(y) - rho_eval(profile, std::log(x)));
}

double f0_excess(const CouplingProfile& profile, double z) { return tail_excess(profile, z); }

double f0_eval(const CouplingProfile& profile, double z) { return 1.0 + f0_excess(profile, z); }

double f0_deriv(const CouplingProfile& profile, double z) { return tail_excess_deriv(profile, z); }

double potential_energy(const CouplingProfile& profile, const ModuliCurve& curve, double z,
                        const TeichPoint& p) {
    return f0_eval(profile, z) * identity_energy(p, curve_eval(curve, z));
}

double potential_energy_excess(const CouplingProfile& profile, const ModuliCurve& curve,
                               double z, const TeichPoint& p) {
    const double df = f0_excess(profile, z);
    const double de = identity_energy_excess(p, curve_eval(curve, z));
    return df + de + df * de;
}

std::string_view to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::dehn_twist: return "dehn_twist";
        case CurveKind::closed_loop: return "closed_loop";
        case CurveKind::spline: return "spline";
    }
    return "?";
}

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::staircase: return "staircase";
        case ProfileKind::analytic_strip: return "analytic_strip";
        case ProfileKind::converging_well: return "converging_well";
    }
    return "?";
}

std::string_view to_string(TailKind kind) {
    return kind == TailKind::exponential ? "exponential" : "power";
}

CurveKind curve_kind_from_string(std::string_view text) {
    if (text == "dehn_twist") return CurveKind::dehn_twist;
    if (text == "closed_loop") return CurveKind::closed_loop;
    if (text == "spline") return CurveKind::spline;
    throw DomainError("unknown curve kind '" + std::string(text) + "'");
}

ProfileKind profile_kind_from_string(std::string_view text) {
    if (text == "staircase") return ProfileKind::staircase;
    if (text == "analytic_strip") return ProfileKind::analytic_strip;
    if (text == "converging_well") return ProfileKind::converging_well;
    throw DomainError("unknown profile kind '" + std::string(text) + "'");
}

TailKind tail_kind_from_string(std::string_view text) {
    if (text == "exponential") return TailKind::exponential;
    if (text == "power") return TailKind::power;
    throw DomainError("unknown profile tail '" + std::string(text) + "'");
}

}  // namespace tmhf
