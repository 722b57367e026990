#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tmhf/oracles.hpp"
#include "tmhf/target.hpp"

using namespace tmhf;
using doctest::Approx;

namespace {

CouplingProfile staircase(double w = 0.1, TailKind tail = TailKind::exponential) {
    CouplingProfile p;
    p.kind = ProfileKind::staircase;
    p.width = w;
    p.tail = tail;
    return p;
}

CouplingProfile analytic() {
    CouplingProfile p;
    p.kind = ProfileKind::analytic_strip;
    return p;
}

CouplingProfile well(double center = 0.0) {
    CouplingProfile p;
    p.kind = ProfileKind::converging_well;
    p.well_center = center;
    return p;
}

ModuliCurve sample_spline() {
    // Period closes through the deck: last knot = deck^-1 (first knot) = first + 1.
    return ModuliCurve::spline({{0.0, 1.0}, {0.3, 1.4}, {0.6, 0.9}, {1.0, 1.0}},
                               MappingClass::translation(-1));
}

}  // namespace

TEST_SUITE("target") {

TEST_CASE("curve_eval examples") {
    const ModuliCurve dehn = ModuliCurve::dehn_twist(1.0);
    CHECK(curve_eval(dehn, 0.0) == TeichPoint{0, 1});
    const TeichPoint g = curve_eval(dehn, 2.5);
    CHECK(g.a == Approx(2.5));
    CHECK(g.b == Approx(1));
    const ModuliCurve loop = ModuliCurve::closed_loop({0, 2}, 0.5);
    const TeichPoint l = curve_eval(loop, 0.25);
    CHECK(l.a == Approx(0).epsilon(1e-15).scale(1));
    CHECK(l.b == Approx(2.5));
    CHECK(loop.deck == MappingClass::identity());
    CHECK(dehn.deck == MappingClass::translation(-1));
}

TEST_CASE("curve constructors reject invalid parameters") {
    CHECK_THROWS_AS(ModuliCurve::dehn_twist(0.0), DomainError);
    CHECK_THROWS_AS(ModuliCurve::closed_loop({0, 1}, 1.0), DomainError);
    CHECK_THROWS_AS(ModuliCurve::closed_loop({0, 1}, -0.1), DomainError);
    CHECK_THROWS_AS(ModuliCurve::spline({{0, 1}, {1, 1}}), DomainError);
}

TEST_CASE("curve_deriv") {
    const ModuliCurve dehn = ModuliCurve::dehn_twist(1.0);
    for (double s : {-3.0, 0.0, 0.7, 12.25}) {
        const CurveTangent d = curve_deriv(dehn, s);
        CHECK(d.d_alpha == 1.0);
        CHECK(d.d_beta == 0.0);
    }
    const ModuliCurve loop = ModuliCurve::closed_loop({0.3, 2}, 0.5);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const double s = support::uniform(rng, -3, 3);
        const TeichPoint p = curve_eval(loop, s);
        const CurveTangent d = curve_deriv(loop, s);
        CHECK(std::abs(d.d_alpha * (p.a - 0.3) + d.d_beta * (p.b - 2.0)) <= 1e-9);
    }
    for (const ModuliCurve& c : {sample_spline(), loop}) {
        for (int i = 0; i < 200; ++i) {
            double s = support::uniform(rng, -2, 3);
            const double m = c.kind == CurveKind::spline ? 3.0 : 1.0;
            // Stay away from knots, where the spline is only C^1 in s.
            if (c.kind == CurveKind::spline && std::abs(s * m - std::round(s * m)) < 1e-3) s += 0.01;
            const CurveTangent d = curve_deriv(c, s);
            const double fa = oracle::central_diff4([&](double x) { return curve_eval(c, x).a; }, s, 1e-4);
            const double fb = oracle::central_diff4([&](double x) { return curve_eval(c, x).b; }, s, 1e-4);
            CHECK(d.d_alpha == Approx(fa).epsilon(1e-6).scale(1));
            CHECK(d.d_beta == Approx(fb).epsilon(1e-6).scale(1));
        }
    }
}

TEST_CASE("validate_curve") {
    const CurveValidation dehn = validate_curve(ModuliCurve::dehn_twist(1.0), 1000);
    CHECK(dehn.passed);
    CHECK(dehn.max_periodicity_violation == 0.0);
    const CurveValidation loop = validate_curve(ModuliCurve::closed_loop({0, 2}, 0.5), 1000);
    CHECK(loop.passed);
    CHECK(loop.max_periodicity_violation <= 1e-12);
    CHECK(loop.min_height == Approx(1.5).epsilon(1e-4));
    const CurveValidation spline = validate_curve(sample_spline(), 1000);
    CHECK(spline.passed);
    CHECK(spline.max_periodicity_violation <= 1e-12);

    // Broken: the last knot does not close the period.
    ModuliCurve broken = sample_spline();
    broken.control.back() = {1.0, 1.3};
    const CurveValidation bad = validate_curve(broken, 1000);
    CHECK_FALSE(bad.passed);
    CHECK(bad.max_periodicity_violation > 0.1);
    CHECK_FALSE(bad.messages.empty());
    CHECK(bad.where_s >= 0.0);
    CHECK(bad.where_s < 1.0);
    // The worst mismatch sits on the last segment before the period closes.
    CHECK(bad.where_s >= 2.0 / 3.0 - 1e-9);

    CHECK_THROWS_AS(validate_curve(ModuliCurve::dehn_twist(1.0), 1), DomainError);
}

TEST_CASE("spline leaving the upper half-plane is reported") {
    const ModuliCurve c = ModuliCurve::spline({{0, 0.05}, {0.5, 0.01}, {1.0, 2.0}, {0, 0.05}});
    const CurveValidation v = validate_curve(c, 200, 0.02);
    CHECK_FALSE(v.passed);
}

TEST_CASE("rho examples and properties") {
    std::mt19937_64 rng(22);
    for (const CouplingProfile& p : {staircase(0.1), staircase(0.3), analytic(), well()}) {
        CHECK(rho_eval(p, 3.0) == 3.0);
        CHECK(rho_eval(p, -2.0) == -2.0);
        for (int i = 0; i < 1000; ++i) {
            const double s = support::uniform(rng, -20, 20);
            CHECK(std::abs(rho_eval(p, s + 1) - rho_eval(p, s) - 1.0) <= 1e-12);
            CHECK(rho_deriv(p, s) >= 0.0);
        }
    }
    const CouplingProfile sc = staircase(0.1);
    for (int n = -3; n <= 3; ++n) {
        CHECK(rho_deriv(sc, n) == 0.0);
        CHECK(rho_eval(sc, n + 0.09) == Approx(n).epsilon(1e-15).scale(1));
        CHECK(rho_eval(sc, n - 0.09) == Approx(n).epsilon(1e-15).scale(1));
    }
    CHECK(rho_eval(analytic(), 0.37) == 0.37);
}

TEST_CASE("f examples") {
    const CouplingProfile sc = staircase();
    CHECK(f_eval(sc, 0.0, 2.0) == 1.0);
    CHECK(f_eval(sc, -3.0, 0.5) == 1.0);
    CHECK(f_eval(sc, 1.0, 1.0) == Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
    CHECK(f_eval(sc, 1.0, 1.0) == Approx(1.3678794).epsilon(1e-7));
    CHECK(std::abs(f_eval(sc, std::numbers::e, std::numbers::e) - f_eval(sc, 1.0, 1.0)) <= 1e-12);
    CHECK_THROWS_AS(f_eval(sc, 1.0, 0.0), DomainError);
}

TEST_CASE("f invariance under (x, y) -> (e x, e y)") {
    std::mt19937_64 rng(23);
    for (const CouplingProfile& p : {staircase(), staircase(0.2, TailKind::power), analytic(), well(0.3)}) {
        for (int i = 0; i < 10000; ++i) {
            const double x = std::exp(support::uniform(rng, -5, 5));
            const double y = std::exp(support::uniform(rng, -5, 5));
            CHECK(std::abs(f_eval(p, std::numbers::e * x, std::numbers::e * y) - f_eval(p, x, y)) <= 1e-12);
            const double v = f_eval(p, x, y);
            CHECK(v >= 1.0);
            CHECK(v <= 2.0);
        }
    }
}

TEST_CASE("staircase f is flat in x at x = 1") {
    for (const CouplingProfile& p : {staircase(), staircase(0.1, TailKind::power)}) {
        for (double y = 0.1; y <= 100.0; y *= 1.3) {
            const double d = oracle::central_diff2([&](double x) { return f_eval(p, x, y); }, 1.0, 1e-3);
            CHECK(std::abs(d) <= 1e-8);
        }
    }
}

TEST_CASE("f0 for the winding profiles") {
    const CouplingProfile sc = staircase();
    CHECK(f0_eval(sc, 0.0) == Approx(1.3678794).epsilon(1e-7));
    CHECK(f0_eval(sc, 0.0) == Approx(f_eval(sc, 1.0, 1.0)).epsilon(1e-15));
    CHECK(f0_deriv(sc, 0.0) == Approx(-std::exp(-1.0)).epsilon(1e-15));
    CHECK(f0_eval(sc, 40.0) == 1.0);
    CHECK(f0_eval(sc, -40.0) == Approx(2.0));

    std::mt19937_64 rng(24);
    for (const CouplingProfile& p : {sc, analytic(), staircase(0.1, TailKind::power)}) {
        double prev = f0_eval(p, -5.0);
        double max_slope = 0.0;
        for (double z = -5.0 + 0.01; z <= 3.0; z += 0.01) {
            const double v = f0_eval(p, z);
            CHECK(v < prev);
            CHECK(f0_deriv(p, z) < 0.0);
            max_slope = std::max(max_slope, std::abs(f0_deriv(p, z)));
            prev = v;
        }
        CHECK(max_slope < 1.0);
        for (int i = 0; i < 200; ++i) {
            const double z = support::uniform(rng, -4, 6);
            const double fd = oracle::central_diff4([&](double x) { return f0_eval(p, x); }, z, 1e-3);
            CHECK(std::abs(f0_deriv(p, z) - fd) <= 1e-8);
            CHECK(f0_excess(p, z) == Approx(f0_eval(p, z) - 1.0).epsilon(1e-12));
            CHECK(f0_eval(p, z) == Approx(f_eval(p, 1.0, std::exp(z))).epsilon(1e-14));
        }
    }
    // Power tail: f0 = 1 + (1 + e^z)^(-lambda).
    const CouplingProfile pw = staircase(0.1, TailKind::power);
    CHECK(f0_eval(pw, 0.0) == Approx(1.0 + std::pow(2.0, -1.5)).epsilon(1e-15));
    CHECK(f0_eval(pw, 30.0) - 1.0 == Approx(std::exp(-45.0)).epsilon(1e-6));
}

TEST_CASE("converging well profile") {
    const CouplingProfile w = well(0.5);
    CHECK(f0_eval(w, 0.5) == 1.0);
    CHECK(f0_deriv(w, 0.5) == 0.0);
    CHECK(f0_eval(w, 1.5) == Approx(1.5));
    CHECK(f0_eval(w, 1e6) == Approx(2.0));
    CHECK(f_eval(w, 0.0, 1.0) == 2.0);
    std::mt19937_64 rng(25);
    for (int i = 0; i < 200; ++i) {
        const double z = support::uniform(rng, -5, 5);
        CHECK(f0_eval(w, z) >= 1.0);
        if (std::abs(z - 0.5) > 1e-6) CHECK(f0_eval(w, z) > 1.0);
        const double fd = oracle::central_diff4([&](double x) { return f0_eval(w, x); }, z, 1e-3);
        CHECK(std::abs(f0_deriv(w, z) - fd) <= 1e-8);
    }
}

TEST_CASE("profile validation") {
    CouplingProfile p;
    p.width = 0.5;
    CHECK_THROWS_AS(p.check(), DomainError);
    p.width = 0.0;
    CHECK_THROWS_AS(p.check(), DomainError);
    p.width = 0.2;
    p.tail_exponent = -1;
    CHECK_THROWS_AS(p.check(), DomainError);
    CHECK_THROWS_AS(profile_kind_from_string("stairs"), DomainError);
    CHECK(profile_kind_from_string(to_string(ProfileKind::analytic_strip)) == ProfileKind::analytic_strip);
    CHECK(curve_kind_from_string(to_string(CurveKind::spline)) == CurveKind::spline);
    CHECK(tail_kind_from_string(to_string(TailKind::power)) == TailKind::power);
}

TEST_CASE("potential energy") {
    const CouplingProfile sc = staircase();
    const ModuliCurve dehn = ModuliCurve::dehn_twist(1.0);
    CHECK(potential_energy(sc, dehn, 0.7, curve_eval(dehn, 0.7)) == Approx(f0_eval(sc, 0.7)).epsilon(1e-15));
    CHECK(potential_energy(sc, dehn, 0.0, {0, 2}) == Approx(1.7098492).epsilon(1e-7));
    CHECK(potential_energy(sc, dehn, 0.0, {0, 2}) == Approx((1 + std::exp(-1.0)) * 1.25).epsilon(1e-15));
    std::mt19937_64 rng(26);
    for (int i = 0; i < 1000; ++i) {
        const double z = support::uniform(rng, -3, 8);
        const TeichPoint p{support::uniform(rng, -5, 5), support::uniform(rng, 0.1, 5)};
        const double e = potential_energy(sc, dehn, z, p);
        CHECK(e >= 1.0);
        CHECK(e >= f0_eval(sc, z));
        CHECK(potential_energy_excess(sc, dehn, z, p) == Approx(e - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("smoothness: finite differences converge at second order") {
    // Central difference error ~ C h^2: halving h divides it by about 4.
    auto order = [](const std::function<double(double)>& f, const std::function<double(double)>& df,
                    double x) {
        double prev = NAN;
        std::vector<double> ratios;
        for (double h = 0.08; h > 0.004; h /= 2) {
            const double err = std::abs(oracle::central_diff2(f, x, h) - df(x));
            if (!std::isnan(prev) && err > 1e-13) ratios.push_back(prev / err);
            prev = err;
        }
        return ratios;
    };
    const CouplingProfile sc = staircase(0.2);
    auto check_ratios = [](const std::vector<double>& r) {
        REQUIRE(!r.empty());
        for (double v : r) CHECK(v == Approx(4.0).epsilon(0.25));
    };
    check_ratios(order([&](double s) { return rho_eval(sc, s); }, [&](double s) { return rho_deriv(sc, s); }, 0.45));
    check_ratios(order([&](double z) { return f0_eval(sc, z); }, [&](double z) { return f0_deriv(sc, z); }, 0.3));
    check_ratios(order([&](double x) { return f_eval(sc, x, 2.0); },
                       [&](double x) {
                           return oracle::central_diff4([&](double u) { return f_eval(sc, u, 2.0); }, x, 1e-3);
                       },
                       1.6));
    // Second derivative of rho by nested differences stays bounded as h -> 0.
    double last = 0.0;
    for (double h = 0.02; h > 0.002; h /= 2) {
        const double d2 = (rho_eval(sc, 0.45 + h) - 2 * rho_eval(sc, 0.45) + rho_eval(sc, 0.45 - h)) / (h * h);
        if (last != 0.0) CHECK(d2 == Approx(last).epsilon(0.05));
        last = d2;
    }
}

}  // TEST_SUITE
