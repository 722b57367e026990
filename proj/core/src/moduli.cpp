#include "tmhf/moduli.hpp"

#include <cmath>
#include <sstream>

namespace tmhf {

namespace {

constexpr double kTieTol = 1e-13;

}  // namespace

TeichPoint::TeichPoint(double a_, double b_) : a(a_), b(b_) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > 0.0)) {
        std::ostringstream os;
        os << "TeichPoint requires finite a and b > 0, got (" << a << ", " << b << ")";
        throw DomainError(os.str());
    }
}

MappingClass::MappingClass(std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s)
    : m_{p, q, r, s} {
    if (p * s - q * r != 1) {
        throw DomainError("mapping class must be orientation preserving (det = +1), got det = " +
                          std::to_string(p * s - q * r));
    }
}

MappingClass operator*(const MappingClass& lhs, const MappingClass& rhs) {
    const auto& a = lhs.m_;
    const auto& b = rhs.m_;
    return MappingClass(MappingClass::Unchecked{},
                        {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                         a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]});
}

MappingClass MappingClass::pow(std::int64_t n) const {
    MappingClass base = n < 0 ? inverse() : *this;
    std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    MappingClass result;
    while (e > 0) {
        if (e & 1U) result = result * base;
        base = base * base;
        e >>= 1U;
    }
    return result;
}

std::string MappingClass::to_string() const {
    std::ostringstream os;
    os << "[[" << p() << ", " << q() << "], [" << r() << ", " << s() << "]]";
    return os.str();
}

FlatMetric metric_from_point(const TeichPoint& p) {
    const double inv_b = 1.0 / p.b;
    return {inv_b, p.a * inv_b, (p.a * p.a + p.b * p.b) * inv_b};
}

FlatMetric metric_partial_a(const TeichPoint& p) {
    return {0.0, 1.0 / p.b, 2.0 * p.a / p.b};
}

FlatMetric metric_partial_b(const TeichPoint& p) {
    const double inv_b2 = 1.0 / (p.b * p.b);
    return {-inv_b2, -p.a * inv_b2, 1.0 - p.a * p.a * inv_b2};
}

FlatMetric congruence(const FlatMetric& g, const std::array<std::int64_t, 4>& m) {
    const double m11 = static_cast<double>(m[0]), m12 = static_cast<double>(m[1]);
    const double m21 = static_cast<double>(m[2]), m22 = static_cast<double>(m[3]);
    // columns c1 = (m11, m21), c2 = (m12, m22); result_ij = c_i^T g c_j
    auto form = [&](double x1, double y1, double x2, double y2) {
        return x1 * (g.xx * x2 + g.xy * y2) + y1 * (g.xy * x2 + g.yy * y2);
    };
    return {form(m11, m21, m11, m21), form(m11, m21, m12, m22), form(m12, m22, m12, m22)};
}

TeichPoint point_from_metric(const FlatMetric& g) {
    if (!(g.xx > 0.0) || !(g.det() > 0.0)) {
        throw DomainError("point_from_metric: metric is not positive definite");
    }
    const double b = 1.0 / g.xx;
    return {g.xy * b, b};
}

double hyperbolic_distance(const TeichPoint& p, const TeichPoint& q) {
    // 2 asinh(|p - q| / (2 sqrt(b beta))) is exact and stays accurate near the diagonal.
    const double da = p.a - q.a;
    const double db = p.b - q.b;
    return 2.0 * std::asinh(std::hypot(da, db) / (2.0 * std::sqrt(p.b * q.b)));
}

double wp_distance(const TeichPoint& p, const TeichPoint& q) {
    return 2.0 * hyperbolic_distance(p, q);
}

double identity_energy_excess(const TeichPoint& p, const TeichPoint& q) {
    const double da = p.a - q.a;
    const double db = p.b - q.b;
    return (da * da + db * db) / (2.0 * p.b * q.b);
}

double identity_energy(const TeichPoint& p, const TeichPoint& q) {
    return 1.0 + identity_energy_excess(p, q);
}

EnergyGradient identity_energy_grad(const TeichPoint& p, const TeichPoint& q) {
    const double da = p.a - q.a;
    const double db = p.b - q.b;
    const double n = da * da + db * db;
    const double bb = p.b * q.b;
    EnergyGradient g;
    g.d_a = da / bb;
    g.d_alpha = -g.d_a;
    g.d_b = db / bb - n / (2.0 * p.b * bb);
    g.d_beta = -db / bb - n / (2.0 * q.b * bb);
    return g;
}

QuadDiffCoeff hopf_coefficient(const TeichPoint& p, const TeichPoint& q, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("hopf_coefficient: scale must be positive and finite");
    }
    // Chart w = T x makes g_p Euclidean; the pulled-back target metric is
    // H = scale * T^{-T} g_q T^{-1} with T^{-1} = [[sqrt(b), -a/sqrt(b)], [0, 1/sqrt(b)]].
    const FlatMetric g = metric_from_point(q);
    const double sb = std::sqrt(p.b);
    const double c11 = sb, c12 = -p.a / sb, c22 = 1.0 / sb;  // T^{-1}, c21 = 0
    const double h11 = scale * (c11 * c11 * g.xx);
    const double h12 = scale * (c11 * (g.xx * c12 + g.xy * c22));
    const double h22 = scale * (c12 * (g.xx * c12 + g.xy * c22) + c22 * (g.xy * c12 + g.yy * c22));
    return {0.25 * (h11 - h22), -0.5 * h12};
}

double quad_diff_l2_norm_sq(QuadDiffCoeff phi, const TeichPoint& /*p*/, double kappa) {
    // Constant coefficient in a chart where g_p is Euclidean on a unit-area cell.
    return kappa * std::norm(phi);
}

FlatMetric hopf_real_part_tensor(QuadDiffCoeff phi, const TeichPoint& p) {
    // Re(4 phi dw^2) = [[A, B], [B, -A]] in w, A = 4 Re phi, B = -4 Im phi.
    const double big_a = 4.0 * phi.real();
    const double big_b = -4.0 * phi.imag();
    // Pull back to lattice coordinates: T^T R T, T = [[t11, t12], [0, t22]].
    const double sb = std::sqrt(p.b);
    const double t11 = 1.0 / sb, t12 = p.a / sb, t22 = sb;
    return {t11 * t11 * big_a, t11 * (big_a * t12 + big_b * t22),
            t12 * (big_a * t12 + big_b * t22) + t22 * (big_b * t12 - big_a * t22)};
}

double l2_inner(const FlatMetric& g, const FlatMetric& h, const FlatMetric& k) {
    const double det = g.det();
    const FlatMetric gi{g.yy / det, -g.xy / det, g.xx / det};
    // (g^-1 h) and (g^-1 k) as full 2x2 products, then trace of the product.
    const double a11 = gi.xx * h.xx + gi.xy * h.xy, a12 = gi.xx * h.xy + gi.xy * h.yy;
    const double a21 = gi.xy * h.xx + gi.yy * h.xy, a22 = gi.xy * h.xy + gi.yy * h.yy;
    const double b11 = gi.xx * k.xx + gi.xy * k.xy, b12 = gi.xx * k.xy + gi.xy * k.yy;
    const double b21 = gi.xy * k.xx + gi.yy * k.xy, b22 = gi.xy * k.xy + gi.yy * k.yy;
    return (a11 * b11 + a12 * b21 + a21 * b12 + a22 * b22) * std::sqrt(det);
}

double l2_metric_speed(const TeichPoint& p, double da, double db) {
    return std::sqrt(kL2MetricFactor) * std::hypot(da, db) / p.b;
}

TeichPoint mapping_class_apply(const MappingClass& m, const TeichPoint& p) {
    const std::complex<double> tau = p.tau();
    const auto pp = static_cast<double>(m.p()), qq = static_cast<double>(m.q());
    const auto rr = static_cast<double>(m.r()), ss = static_cast<double>(m.s());
    if (m.r() == 0) {
        // p = s = +-1: pure translation, exact in floating point up to rounding of a + q.
        return {(pp * p.a + qq) / ss, p.b};
    }
    const std::complex<double> den = rr * tau + ss;
    const double den2 = std::norm(den);
    // Im((p tau + q)/(r tau + s)) = Im(tau) / |r tau + s|^2 for det 1.
    const double a = ((pp * p.a + qq) * (rr * p.a + ss) + pp * rr * p.b * p.b) / den2;
    return {a, p.b / den2};
}

bool in_fundamental_domain(const TeichPoint& p, double tol) {
    return std::abs(p.a) <= 0.5 + tol && p.a * p.a + p.b * p.b >= 1.0 - tol;
}

Reduction reduce_to_fundamental_domain(const TeichPoint& p) {
    TeichPoint x = p;
    MappingClass acc;
    const MappingClass inv = MappingClass::inversion();
    for (int iter = 0; iter < 10000; ++iter) {
        const auto shift = static_cast<std::int64_t>(std::floor(x.a + 0.5));
        if (shift != 0) {
            const MappingClass t = MappingClass::translation(-shift);
            x = mapping_class_apply(t, x);
            acc = t * acc;
        }
        if (x.a * x.a + x.b * x.b < 1.0 - kTieTol) {
            x = mapping_class_apply(inv, x);
            acc = inv * acc;
            continue;
        }
        break;
    }
    // Ties: a = 1/2 is already mapped to -1/2 by the floor above; on the unit
    // circle prefer the representative with a <= 0.
    if (std::abs(x.a * x.a + x.b * x.b - 1.0) <= kTieTol && x.a > 0.0) {
        x = mapping_class_apply(inv, x);
        acc = inv * acc;
    }
    return {x, acc};
}

double injectivity_radius(const TeichPoint& p) {
    // In the fundamental domain the lattice (1, tau)/sqrt(b) has shortest vector 1/sqrt(b).
    const Reduction r = reduce_to_fundamental_domain(p);
    return 0.5 / std::sqrt(r.point.b);
}

}  // namespace tmhf
