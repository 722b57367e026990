#include "tmhf/validate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "tmhf/flow.hpp"
#include "tmhf/oracles.hpp"

namespace tmhf {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

TeichPoint random_point(Rng& rng, double b_lo = 0.1, double b_hi = 10.0, double a_span = 5.0) {
    return {uniform(rng, -a_span, a_span), std::exp(uniform(rng, std::log(b_lo), std::log(b_hi)))};
}

MappingClass random_mapping_class(Rng& rng) {
    std::uniform_int_distribution<int> entry(-5, 5);
    for (;;) {
        const int p = entry(rng), q = entry(rng), r = entry(rng), s = entry(rng);
        if (p * s - q * r == 1) return {p, q, r, s};
    }
}

struct Tracker {
    SuiteResult result;
    Tracker(std::string name, double tol) {
        result.name = std::move(name);
        result.tolerance = tol;
    }
    void add(double err) {
        ++result.samples;
        if (!(err <= result.max_error)) result.max_error = std::isnan(err) ? INFINITY : err;
    }
    SuiteResult done() {
        result.passed = result.max_error <= result.tolerance;
        return result;
    }
};

// Random target scenario used by the flow suites.
struct RandomSystem {
    CouplingProfile profile;
    ModuliCurve curve;
    double eta;
};

RandomSystem random_system(Rng& rng, int i) {
    RandomSystem s;
    s.profile.kind = i % 3 == 0 ? ProfileKind::staircase
                                : (i % 3 == 1 ? ProfileKind::analytic_strip : ProfileKind::converging_well);
    s.profile.width = uniform(rng, 0.05, 0.3);
    s.profile.tail = i % 2 == 0 ? TailKind::exponential : TailKind::power;
    s.profile.tail_exponent = uniform(rng, 1.0, 3.0);
    s.profile.well_center = uniform(rng, -1.0, 1.0);
    if (i % 4 < 2) {
        s.curve = ModuliCurve::dehn_twist(uniform(rng, 0.5, 2.0), uniform(rng, -0.5, 0.5));
    } else {
        s.curve = ModuliCurve::closed_loop({uniform(rng, -0.5, 0.5), uniform(rng, 1.5, 3.0)},
                                           uniform(rng, 0.0, 1.0));
    }
    s.eta = uniform(rng, 0.5, 2.0);
    return s;
}

SuiteResult cosh_identity(Rng& rng) {
    Tracker t("cosh_identity", 1e-10);
    for (int i = 0; i < 10000; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng);
        const double e = identity_energy(p, q);
        t.add(std::abs(e - std::cosh(hyperbolic_distance(p, q))));
        t.add(std::abs(e - std::cosh(oracle::hyperbolic_distance_log(p, q))));
    }
    t.result.note = "|E - cosh d_H| with library and cross-ratio distances";
    return t.done();
}

SuiteResult wp_bound(Rng& rng) {
    Tracker t("wp_bound", 0.0);
    for (int i = 0; i < 10000; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng);
        const double lhs = wp_distance(p, q);
        const double rhs = 2.0 * std::sqrt(2.0) * std::sqrt(identity_energy_excess(p, q));
        t.add(std::max(0.0, lhs - rhs));
    }
    t.result.note = "max excess of d_WP over 2 sqrt2 (E - 1)^1/2";
    return t.done();
}

SuiteResult gradient_consistency(Rng& rng, double kappa_scale) {
    Tracker t("gradient_consistency", 1e-6);
    for (int i = 0; i < 100; ++i) {
        const RandomSystem rs = random_system(rng, i);
        const FlowSystem sys(rs.profile, rs.curve, rs.eta);
        const FlowState s{0.0, uniform(rng, -1.0, 3.0), uniform(rng, -2.0, 2.0),
                          std::exp(uniform(rng, std::log(0.3), std::log(3.0)))};
        const FlowVelocity v = sys.velocity(s);
        const double rate = sys.decay_rate(s, kQuadDiffNormConstant * kappa_scale);
        const double vnorm = std::sqrt(v.z * v.z + v.a * v.a + v.b * v.b);
        const double h = 1e-4 / std::max(vnorm, 1.0);
        const double fd = oracle::central_diff4(
            [&](double e) {
                return sys.energy_excess({0.0, s.z + e * v.z, s.a + e * v.a, s.b + e * v.b});
            },
            0.0, h);
        t.add(std::abs(rate - fd) / std::max(std::abs(fd), 1e-300));
    }
    t.result.note = "relative |decay_rate - d/dt E| along (dz/dt, da/dt, db/dt)";
    return t.done();
}

SuiteResult velocity_constant(Rng& rng) {
    Tracker t("metric_velocity_constant", 1e-6);
    std::vector<double> ratios;
    double worst_angle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const RandomSystem rs = random_system(rng, i);
        const FlowState s{0.0, uniform(rng, -1.0, 3.0), uniform(rng, -2.0, 2.0),
                          std::exp(uniform(rng, std::log(0.3), std::log(3.0)))};
        const MetricVelocity mv = metric_velocity(rs.profile, rs.curve, s, rs.eta);
        const TeichPoint g = curve_eval(rs.curve, s.z);
        const EnergyGradient grad = identity_energy_grad({s.a, s.b}, g);
        const double f0 = f0_eval(rs.profile, s.z);
        const double ga = -s.b * s.b * f0 * grad.d_a;
        const double gb = -s.b * s.b * f0 * grad.d_b;
        const double gn = std::hypot(ga, gb);
        if (gn == 0.0) continue;
        const double ratio = (mv.a * ga + mv.b * gb) / (gn * gn) / (rs.eta * rs.eta);
        const double cross = std::abs(mv.a * gb - mv.b * ga) / (gn * std::hypot(mv.a, mv.b));
        worst_angle = std::max(worst_angle, cross);
        ratios.push_back(ratio);
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double cv = std::sqrt(var / static_cast<double>(ratios.size())) / std::abs(mean);
    t.add(cv);
    t.add(worst_angle);
    t.add(std::abs(mean - 0.5));
    t.result.samples = ratios.size();
    t.result.note = "(da, db) = c eta^2 (-b^2 grad E), c = " + std::to_string(mean) +
                    "; max of coefficient of variation, sine of angle and |c - 1/2|";
    return t.done();
}

SuiteResult hopf_quadrature(Rng& rng) {
    Tracker t("hopf_quadrature", 1e-8);
    for (int i = 0; i < 100; ++i) {
        const TeichPoint p = random_point(rng, 0.2, 5.0, 2.0), q = random_point(rng, 0.2, 5.0, 2.0);
        const double scale = uniform(rng, 0.5, 2.0);
        t.add(std::abs(hopf_coefficient(p, q, scale) - oracle::hopf_quadrature(p, q, scale)));
    }
    t.result.note = "|phi - quadrature of 1/4 (|u_1|^2 - |u_2|^2 - 2i <u_1, u_2>)|";
    return t.done();
}

SuiteResult energy_quadrature(Rng& rng) {
    Tracker t("energy_quadrature", 1e-8);
    for (int i = 0; i < 100; ++i) {
        const TeichPoint p = random_point(rng, 0.2, 5.0, 2.0), q = random_point(rng, 0.2, 5.0, 2.0);
        t.add(std::abs(identity_energy(p, q) - oracle::energy_quadrature(p, q)));
    }
    t.result.note = "|E - quadrature of 1/2 |du|^2|";
    return t.done();
}

SuiteResult lattice_brute_force(Rng& rng) {
    Tracker t("lattice_brute_force", 1e-12);
    for (int i = 0; i < 1000; ++i) {
        const TeichPoint p = random_point(rng, 0.05, 20.0, 3.0);
        t.add(std::abs(injectivity_radius(p) - oracle::shortest_vector_half(p)));
    }
    t.result.note = "|inj - shortest vector over |m|, |n| <= 50|";
    return t.done();
}

SuiteResult mapping_class_congruence(Rng& rng) {
    Tracker t("mapping_class_congruence", 1e-12);
    for (int i = 0; i < 1000; ++i) {
        const MappingClass A = random_mapping_class(rng);
        const TeichPoint p = random_point(rng, 0.5, 2.0, 1.0), q = random_point(rng, 0.5, 2.0, 1.0);
        const TeichPoint ap = mapping_class_apply(A, p);
        const FlatMetric lhs = metric_from_point(ap);
        const FlatMetric rhs = congruence(metric_from_point(p), A.lattice_matrix());
        const double scale = std::max({1.0, std::abs(rhs.xx), std::abs(rhs.xy), std::abs(rhs.yy)});
        t.add(std::max({std::abs(lhs.xx - rhs.xx), std::abs(lhs.xy - rhs.xy),
                        std::abs(lhs.yy - rhs.yy)}) / scale);
        const TeichPoint ref = oracle::lattice_pullback(p, A.lattice_matrix());
        t.add(hyperbolic_distance(ap, ref));
        const double d = hyperbolic_distance(p, q);
        t.add(std::abs(hyperbolic_distance(ap, mapping_class_apply(A, q)) - d) / std::max(1.0, d));
        t.add(std::abs(injectivity_radius(ap) - injectivity_radius(p)));
    }
    t.result.note = "metric congruence, lattice pull-back, isometry and systole invariance";
    return t.done();
}

std::vector<SuiteResult> identity_rows() {
    std::vector<SuiteResult> rows;
    const TeichPoint pts[] = {{0.0, 1.0}, {0.3, 2.0}, {-1.5, 0.25}};
    auto row = [&](std::string name, auto error) {
        Tracker t(std::move(name), 1e-15);
        for (const TeichPoint& p : pts) t.add(error(p));
        t.result.note = "identity inputs p = q (zero up to rounding)";
        rows.push_back(t.done());
    };
    row("identity_energy_excess", [](const TeichPoint& p) { return std::abs(identity_energy_excess(p, p)); });
    row("identity_distance", [](const TeichPoint& p) { return hyperbolic_distance(p, p); });
    row("identity_gradient", [](const TeichPoint& p) {
        const EnergyGradient g = identity_energy_grad(p, p);
        return std::max({std::abs(g.d_a), std::abs(g.d_b), std::abs(g.d_alpha), std::abs(g.d_beta)});
    });
    row("identity_hopf", [](const TeichPoint& p) { return std::abs(hopf_coefficient(p, p, 1.7)); });
    row("identity_metric_velocity", [](const TeichPoint& p) {
        const ModuliCurve c = ModuliCurve::closed_loop(p, 0.0);
        CouplingProfile prof;
        prof.kind = ProfileKind::converging_well;
        const MetricVelocity v = metric_velocity(prof, c, {0.0, 0.4, p.a, p.b}, 1.0);
        return std::max(std::abs(v.a), std::abs(v.b));
    });
    return rows;
}

}  // namespace

bool ValidationReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

ValidationReport validate(const ValidationOptions& options) {
    Rng rng(options.seed);
    ValidationReport r;
    r.suites.push_back(cosh_identity(rng));
    r.suites.push_back(wp_bound(rng));
    r.suites.push_back(gradient_consistency(rng, options.kappa_scale));
    r.suites.push_back(velocity_constant(rng));
    r.suites.push_back(hopf_quadrature(rng));
    r.suites.push_back(energy_quadrature(rng));
    r.suites.push_back(lattice_brute_force(rng));
    r.suites.push_back(mapping_class_congruence(rng));
    for (SuiteResult& s : identity_rows()) r.suites.push_back(std::move(s));
    return r;
}

void print_report(std::ostream& out, const ValidationReport& report) {
    out << std::left << std::setw(28) << "suite" << std::setw(9) << "samples" << std::setw(14)
        << "max_error" << std::setw(11) << "tolerance" << "result\n";
    for (const SuiteResult& s : report.suites) {
        std::ostringstream err, tol;
        err << std::setprecision(3) << s.max_error;
        tol << std::setprecision(3) << s.tolerance;
        out << std::left << std::setw(28) << s.name << std::setw(9) << s.samples << std::setw(14)
            << err.str() << std::setw(11) << tol.str() << (s.passed ? "pass" : "FAIL") << "\n";
        if (!s.note.empty()) out << "    " << s.note << "\n";
    }
    out << (report.passed() ? "all suites passed\n" : "some suites FAILED\n");
}

}  // namespace tmhf
