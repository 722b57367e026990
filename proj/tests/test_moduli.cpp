#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tmhf/moduli.hpp"
#include "tmhf/oracles.hpp"

using namespace tmhf;
using doctest::Approx;

namespace {

TeichPoint random_point(std::mt19937_64& rng) {
    return {support::uniform(rng, -3, 3), std::exp(support::uniform(rng, std::log(0.1), std::log(10.0)))};
}

}  // namespace

TEST_SUITE("moduli") {

TEST_CASE("metric_from_point matches T^T T") {
    const FlatMetric id = metric_from_point({0, 1});
    CHECK(id == FlatMetric{1, 0, 1});
    const FlatMetric g = metric_from_point({1, 1});
    CHECK(g.xx == Approx(1));
    CHECK(g.xy == Approx(1));
    CHECK(g.yy == Approx(2));
    const FlatMetric h = metric_from_point({0, 4});
    CHECK(h.xx == Approx(0.25));
    CHECK(h.xy == 0.0);
    CHECK(h.yy == Approx(4));
}

TEST_CASE("unit determinant and inversion of metric_from_point") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const TeichPoint p = random_point(rng);
        const FlatMetric g = metric_from_point(p);
        CHECK(std::abs(g.det() - 1.0) <= 1e-12 * std::max(1.0, g.xx * g.yy));
        const TeichPoint back = point_from_metric(g);
        CHECK(back.a == Approx(p.a).epsilon(1e-12));
        CHECK(back.b == Approx(p.b).epsilon(1e-12));
    }
}

TEST_CASE("TeichPoint rejects invalid heights") {
    CHECK_THROWS_AS(TeichPoint(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(TeichPoint(0.0, -1.0), DomainError);
    CHECK_THROWS_AS(TeichPoint(NAN, 1.0), DomainError);
}

TEST_CASE("hyperbolic and Weil-Petersson distances") {
    CHECK(hyperbolic_distance({0.3, 2}, {0.3, 2}) == 0.0);
    CHECK(hyperbolic_distance({0, 1}, {0, std::numbers::e}) == Approx(1.0).epsilon(1e-14));
    CHECK(hyperbolic_distance({0, 1}, {1, 1}) == Approx(std::acosh(1.5)).epsilon(1e-14));
    CHECK(hyperbolic_distance({0, 1}, {1, 1}) == Approx(0.96242365).epsilon(1e-8));
    CHECK(wp_distance({0, 1}, {0, std::numbers::e}) == Approx(2.0).epsilon(1e-14));
    CHECK(wp_distance({0, 1}, {0, 2}) == Approx(2 * std::log(2.0)).epsilon(1e-14));
    CHECK(wp_distance({0, 1}, {0, 2}) == Approx(1.38629).epsilon(1e-5));
}

TEST_CASE("distance is a metric and matches the cross-ratio oracle") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng), r = random_point(rng);
        const double pq = hyperbolic_distance(p, q);
        CHECK(pq == Approx(hyperbolic_distance(q, p)).epsilon(1e-14));
        CHECK(pq <= hyperbolic_distance(p, r) + hyperbolic_distance(r, q) + 1e-12);
        CHECK(pq == Approx(oracle::hyperbolic_distance_log(p, q)).epsilon(1e-11));
        CHECK(wp_distance(p, q) == 2.0 * pq);
    }
}

TEST_CASE("identity energy examples and cosh identity") {
    CHECK(identity_energy({0.4, 0.7}, {0.4, 0.7}) == 1.0);
    CHECK(identity_energy({0, 1}, {0, 2}) == Approx(1.25).epsilon(1e-15));
    CHECK(std::cosh(std::log(2.0)) == Approx(1.25).epsilon(1e-15));
    CHECK(identity_energy({1, 1}, {0, 1}) == Approx(1.5).epsilon(1e-15));
    CHECK(oracle::energy_quadrature({0, 1}, {0, 2}) == Approx(1.25).epsilon(1e-12));
    CHECK(oracle::energy_quadrature({1, 1}, {0, 1}) == Approx(1.5).epsilon(1e-12));

    std::mt19937_64 rng(13);
    for (int i = 0; i < 10000; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng);
        const double e = identity_energy(p, q);
        CHECK(std::abs(e - std::cosh(hyperbolic_distance(p, q))) <= 1e-10);
        CHECK(e >= 1.0);
        CHECK(identity_energy_excess(p, q) == Approx(e - 1.0).epsilon(1e-12));
        if (!(p == q)) CHECK(identity_energy_excess(p, q) > 0.0);
    }
}

TEST_CASE("Weil-Petersson bound with constant 2 sqrt 2") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 10000; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng);
        CHECK(wp_distance(p, q) <= 2.0 * std::sqrt(2.0) * std::sqrt(identity_energy_excess(p, q)));
    }
}

TEST_CASE("energy gradient") {
    const EnergyGradient zero = identity_energy_grad({0.2, 1.3}, {0.2, 1.3});
    CHECK(zero.d_a == 0.0);
    CHECK(zero.d_b == 0.0);
    CHECK(zero.d_alpha == 0.0);
    CHECK(zero.d_beta == 0.0);

    // E = 1 + (b - beta)^2 / (2 b beta) gives d_beta = -(b - beta)/(b beta) - (b - beta)^2/(2 b beta^2),
    // which is +1/2 - 1/8 = 0.375 at b = 1, beta = 2.
    const EnergyGradient g = identity_energy_grad({0, 1}, {0, 2});
    CHECK(g.d_beta == Approx(0.375).epsilon(1e-15));
    const double fd = oracle::central_diff2(
        [](double beta) { return identity_energy({0, 1}, {0, beta}); }, 2.0, 1e-6);
    CHECK(g.d_beta == Approx(fd).epsilon(1e-8));

    std::mt19937_64 rng(15);
    for (int i = 0; i < 200; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng);
        const EnergyGradient gr = identity_energy_grad(p, q);
        auto rel = [](double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-8); };
        const double h = 1e-6;
        const double fa = oracle::central_diff2([&](double a) { return identity_energy({a, p.b}, q); }, p.a, h);
        const double fb = oracle::central_diff2([&](double b) { return identity_energy({p.a, b}, q); }, p.b,
                                                h * p.b);
        const double fal = oracle::central_diff2([&](double a) { return identity_energy(p, {a, q.b}); }, q.a, h);
        const double fbe = oracle::central_diff2([&](double b) { return identity_energy(p, {q.a, b}); }, q.b,
                                                 h * q.b);
        const double scale = std::max(1.0, identity_energy(p, q));
        CHECK(rel(gr.d_a, fa) <= 1e-6 * scale);
        CHECK(rel(gr.d_b, fb) <= 1e-6 * scale);
        CHECK(rel(gr.d_alpha, fal) <= 1e-6 * scale);
        CHECK(rel(gr.d_beta, fbe) <= 1e-6 * scale);
    }
}

TEST_CASE("Hopf coefficient examples") {
    CHECK(std::abs(hopf_coefficient({0.4, 1.7}, {0.4, 1.7}, 3.0)) <= 1e-15);
    const QuadDiffCoeff v = hopf_coefficient({0, 1}, {0, 2}, 1.0);
    CHECK(v.real() == Approx(-0.375).epsilon(1e-15));
    CHECK(v.imag() == Approx(0.0));
    // The second example is not purely imaginary: u_x = (1, 0), u_y = (1, 1) in
    // the target frame gives 1/4 (1 - 2 - 2i) = -0.25 - 0.5i.
    const QuadDiffCoeff w = hopf_coefficient({0, 1}, {1, 1}, 1.0);
    CHECK(w.real() == Approx(-0.25).epsilon(1e-15));
    CHECK(w.imag() == Approx(-0.5).epsilon(1e-15));
    CHECK(std::abs(oracle::hopf_quadrature({0, 1}, {0, 2}, 1.0) - v) <= 1e-8);
    CHECK(std::abs(oracle::hopf_quadrature({0, 1}, {1, 1}, 1.0) - w) <= 1e-8);
    CHECK_THROWS_AS(hopf_coefficient({0, 1}, {0, 2}, 0.0), DomainError);
    CHECK_THROWS_AS(hopf_coefficient({0, 1}, {0, 2}, -1.0), DomainError);
}

TEST_CASE("Hopf coefficient vanishes iff p = q for every scale") {
    std::mt19937_64 rng(16);
    for (int i = 0; i < 500; ++i) {
        const TeichPoint p = random_point(rng), q = random_point(rng);
        const double c = support::uniform(rng, 0.1, 10);
        // Rounding in H = c T^-T g T^-1 scales with |g| |T^-1|^2.
        const double cond = (1 + p.a * p.a + p.b * p.b) / p.b * (p.b + (1 + p.a * p.a) / p.b);
        CHECK(std::abs(hopf_coefficient(p, p, c)) <= 16 * DBL_EPSILON * c * cond);
        CHECK(std::abs(hopf_coefficient(p, q, c)) > 0.0);
        CHECK(std::abs(hopf_coefficient(p, q, c) - oracle::hopf_quadrature(p, q, c)) <=
              1e-8 * std::max(1.0, c * identity_energy(p, q)));
    }
}

TEST_CASE("quadratic differential norm convention") {
    CHECK(quad_diff_l2_norm_sq(0.0, {0, 1}) == 0.0);
    CHECK(kQuadDiffNormConstant == 64.0);
    CHECK(quad_diff_l2_norm_sq(1.0, {0, 1}) == Approx(kQuadDiffNormConstant));
    const QuadDiffCoeff phi{0.3, -0.7};
    CHECK(quad_diff_l2_norm_sq(2.0 * phi, {0.2, 3}) == Approx(4.0 * quad_diff_l2_norm_sq(phi, {0.2, 3})));
    // ||Re Phi||^2 in the L^2 tensor norm is half the quadratic differential norm.
    const TeichPoint p{0.7, 1.9};
    const FlatMetric re = hopf_real_part_tensor(phi, p);
    CHECK(l2_inner(metric_from_point(p), re, re) == Approx(0.5 * quad_diff_l2_norm_sq(phi, p)));
}

TEST_CASE("L2 metric on unit-area flat metrics is twice the hyperbolic metric") {
    // Independent: finite-difference dg/db and dg/da and integrate tr((g^-1 dg)^2) on the unit cell.
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        const TeichPoint p = random_point(rng);
        const double da = support::uniform(rng, -1, 1), db = support::uniform(rng, -1, 1);
        const double h = 1e-5;
        const FlatMetric gp = metric_from_point({p.a + h * da, p.b + h * db});
        const FlatMetric gm = metric_from_point({p.a - h * da, p.b - h * db});
        const FlatMetric dg{(gp.xx - gm.xx) / (2 * h), (gp.xy - gm.xy) / (2 * h), (gp.yy - gm.yy) / (2 * h)};
        const FlatMetric g = metric_from_point(p);
        // g^-1 for det 1.
        const double i11 = g.yy, i12 = -g.xy, i22 = g.xx;
        const double m11 = i11 * dg.xx + i12 * dg.xy, m12 = i11 * dg.xy + i12 * dg.yy;
        const double m21 = i12 * dg.xx + i22 * dg.xy, m22 = i12 * dg.xy + i22 * dg.yy;
        const double tr = m11 * m11 + 2 * m12 * m21 + m22 * m22;
        const double hyper = (da * da + db * db) / (p.b * p.b);
        CHECK(tr / hyper == Approx(kL2MetricFactor).epsilon(1e-6));
        CHECK(l2_metric_speed(p, da, db) == Approx(std::sqrt(tr)).epsilon(1e-6));
    }
}

TEST_CASE("mapping class validation and algebra") {
    CHECK_THROWS_AS(MappingClass(1, 0, 0, -1), DomainError);
    CHECK_THROWS_AS(MappingClass(2, 1, 1, 2), DomainError);
    const MappingClass A(2, 1, 1, 1);
    CHECK(A * A.inverse() == MappingClass::identity());
    CHECK(A.pow(3) == A * A * A);
    CHECK(A.pow(-2) == A.inverse() * A.inverse());
    CHECK(A.pow(0) == MappingClass::identity());
    CHECK(MappingClass::translation(2).pow(3) == MappingClass::translation(6));
}

TEST_CASE("mapping_class_apply examples") {
    const TeichPoint p{0.3, 1.2};
    CHECK(mapping_class_apply(MappingClass::identity(), p) == p);
    const TeichPoint t = mapping_class_apply(MappingClass::translation(1), {0, 1});
    CHECK(t.a == Approx(1));
    CHECK(t.b == Approx(1));
    const TeichPoint s = mapping_class_apply(MappingClass::inversion(), {0, 2});
    CHECK(s.a == Approx(0).epsilon(1e-15));
    CHECK(s.b == Approx(0.5));
}

TEST_CASE("mapping class action matches the lattice congruence oracle and is an isometry") {
    std::mt19937_64 rng(18);
    std::uniform_int_distribution<int> entry(-5, 5);
    int tested = 0;
    while (tested < 500) {
        const int p = entry(rng), q = entry(rng), r = entry(rng), s = entry(rng);
        if (p * s - q * r != 1) continue;
        ++tested;
        const MappingClass A(p, q, r, s);
        const TeichPoint x = random_point(rng), y = random_point(rng);
        const TeichPoint ax = mapping_class_apply(A, x);
        const TeichPoint ref = oracle::lattice_pullback(x, A.lattice_matrix());
        CHECK(hyperbolic_distance(ax, ref) <= 1e-10);
        const FlatMetric lhs = metric_from_point(ax);
        const FlatMetric rhs = congruence(metric_from_point(x), A.lattice_matrix());
        CHECK(lhs.xx == Approx(rhs.xx).epsilon(1e-10));
        CHECK(lhs.xy == Approx(rhs.xy).epsilon(1e-10).scale(std::max(1.0, rhs.xx)));
        CHECK(lhs.yy == Approx(rhs.yy).epsilon(1e-10));
        const double d = hyperbolic_distance(x, y);
        CHECK(std::abs(hyperbolic_distance(ax, mapping_class_apply(A, y)) - d) <= 1e-10 * std::max(1.0, d));
        CHECK(std::abs(injectivity_radius(ax) - injectivity_radius(x)) <= 1e-12);
        // Composition convention.
        const MappingClass B = MappingClass::translation(p);
        const TeichPoint lhs2 = mapping_class_apply(B * A, x);
        const TeichPoint rhs2 = mapping_class_apply(B, mapping_class_apply(A, x));
        CHECK(hyperbolic_distance(lhs2, rhs2) <= 1e-10);
    }
}

TEST_CASE("fundamental domain reduction") {
    const Reduction r0 = reduce_to_fundamental_domain({0, 1});
    CHECK(r0.point == TeichPoint{0, 1});
    CHECK(r0.map == MappingClass::identity());

    const Reduction r1 = reduce_to_fundamental_domain({5, 1});
    CHECK(r1.point.a == Approx(0).epsilon(1e-15));
    CHECK(r1.point.b == Approx(1));
    CHECK(r1.map == MappingClass::translation(-5));

    const Reduction r2 = reduce_to_fundamental_domain({0, 0.25});
    CHECK(r2.point.a == Approx(0).epsilon(1e-15));
    CHECK(r2.point.b == Approx(4));
    CHECK(r2.map == MappingClass::inversion());

    // Ties prefer a <= 0.
    const Reduction r3 = reduce_to_fundamental_domain({0.5, 2});
    CHECK(r3.point.a == Approx(-0.5));
    const double c = std::sqrt(0.75);
    const Reduction r4 = reduce_to_fundamental_domain({0.3, std::sqrt(1 - 0.09)});
    CHECK(r4.point.a <= 0.0);
    CHECK(r4.point.a == Approx(-0.3));
    CHECK(reduce_to_fundamental_domain({0.5, c}).point.a == Approx(-0.5));

    std::mt19937_64 rng(19);
    for (int i = 0; i < 2000; ++i) {
        const TeichPoint p{support::uniform(rng, -50, 50), std::exp(support::uniform(rng, -6, 4))};
        const Reduction r = reduce_to_fundamental_domain(p);
        CHECK(in_fundamental_domain(r.point, 1e-12));
        const TeichPoint mapped = mapping_class_apply(r.map, p);
        CHECK(hyperbolic_distance(mapped, r.point) <= 1e-9);
    }
}

TEST_CASE("injectivity radius") {
    CHECK(injectivity_radius({0, 1}) == Approx(0.5));
    CHECK(injectivity_radius({0, 4}) == Approx(0.25));
    std::mt19937_64 rng(20);
    for (int i = 0; i < 1000; ++i) {
        const TeichPoint p{support::uniform(rng, -3, 3),
                           std::exp(support::uniform(rng, std::log(0.05), std::log(20.0)))};
        CHECK(std::abs(injectivity_radius(p) - oracle::shortest_vector_half(p)) <= 1e-12);
    }
}

}  // TEST_SUITE
