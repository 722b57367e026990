#include "tmhf/oracles.hpp"

#include <cmath>
#include <limits>

namespace tmhf::oracle {

namespace {

struct Mat2 {
    double m00, m01, m10, m11;
};

Mat2 frame(const TeichPoint& p) {
    const double s = 1.0 / std::sqrt(p.b);
    return {s, s * p.a, 0.0, s * p.b};
}

Mat2 mul(const Mat2& x, const Mat2& y) {
    return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
            x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
}

Mat2 inv(const Mat2& x) {
    const double d = x.m00 * x.m11 - x.m01 * x.m10;
    return {x.m11 / d, -x.m01 / d, -x.m10 / d, x.m00 / d};
}

struct Vec2 {
    double x, y;
};

Vec2 apply(const Mat2& m, Vec2 v) { return {m.m00 * v.x + m.m01 * v.y, m.m10 * v.x + m.m11 * v.y}; }

// Partial derivatives of u(w) = L w at w by central differences.
void partials(const Mat2& L, Vec2 w, Vec2& u1, Vec2& u2) {
    const double h = 1e-3;
    const Vec2 p1 = apply(L, {w.x + h, w.y}), m1 = apply(L, {w.x - h, w.y});
    const Vec2 p2 = apply(L, {w.x, w.y + h}), m2 = apply(L, {w.x, w.y - h});
    u1 = {(p1.x - m1.x) / (2 * h), (p1.y - m1.y) / (2 * h)};
    u2 = {(p2.x - m2.x) / (2 * h), (p2.y - m2.y) / (2 * h)};
}

template <typename F>
void cell_quadrature(const TeichPoint& p, int nodes, F body) {
    const Mat2 tp = frame(p);
    for (int i = 0; i < nodes; ++i) {
        for (int k = 0; k < nodes; ++k) {
            const Vec2 x{(i + 0.5) / nodes, (k + 0.5) / nodes};
            body(apply(tp, x), 1.0 / (static_cast<double>(nodes) * nodes));
        }
    }
}

}  // namespace

double energy_quadrature(const TeichPoint& p, const TeichPoint& q, int nodes) {
    const Mat2 L = mul(frame(q), inv(frame(p)));
    double total = 0.0;
    // dw = det(T_p) dx = dx, so the cell weights are the plain midpoint weights.
    cell_quadrature(p, nodes, [&](Vec2 w, double weight) {
        Vec2 u1{}, u2{};
        partials(L, w, u1, u2);
        total += weight * 0.5 * (u1.x * u1.x + u1.y * u1.y + u2.x * u2.x + u2.y * u2.y);
    });
    return total;
}

std::complex<double> hopf_quadrature(const TeichPoint& p, const TeichPoint& q, double scale,
                                     int nodes) {
    const Mat2 L = mul(frame(q), inv(frame(p)));
    std::complex<double> total = 0.0;
    cell_quadrature(p, nodes, [&](Vec2 w, double weight) {
        Vec2 u1{}, u2{};
        partials(L, w, u1, u2);
        const double e11 = scale * (u1.x * u1.x + u1.y * u1.y);
        const double e22 = scale * (u2.x * u2.x + u2.y * u2.y);
        const double e12 = scale * (u1.x * u2.x + u1.y * u2.y);
        total += weight * 0.25 * std::complex<double>(e11 - e22, -2.0 * e12);
    });
    return total;
}

double shortest_vector_half(const TeichPoint& p, int bound) {
    const Mat2 t = frame(p);
    double best = std::numeric_limits<double>::infinity();
    for (int m = -bound; m <= bound; ++m) {
        for (int n = -bound; n <= bound; ++n) {
            if (m == 0 && n == 0) continue;
            const Vec2 v = apply(t, {static_cast<double>(m), static_cast<double>(n)});
            best = std::min(best, std::hypot(v.x, v.y));
        }
    }
    return 0.5 * best;
}

double hyperbolic_distance_log(const TeichPoint& p, const TeichPoint& q) {
    const double near = std::hypot(p.a - q.a, p.b - q.b);
    const double far = std::hypot(p.a - q.a, p.b + q.b);
    if (near == 0.0) return 0.0;
    // far - near = 4 b beta / (far + near), written without cancellation.
    const double gap = 4.0 * p.b * q.b / (far + near);
    return std::log((far + near) / gap);
}

double central_diff4(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double central_diff2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

TeichPoint lattice_pullback(const TeichPoint& p, const std::array<std::int64_t, 4>& m) {
    // New basis vectors T_p M e_1, T_p M e_2; rotate the first onto the positive
    // x-axis and read off the normalized second vector.
    const Mat2 mm{static_cast<double>(m[0]), static_cast<double>(m[1]), static_cast<double>(m[2]),
                  static_cast<double>(m[3])};
    const Mat2 basis = mul(frame(p), mm);
    const Vec2 v1{basis.m00, basis.m10};
    const Vec2 v2{basis.m01, basis.m11};
    const double len1 = std::hypot(v1.x, v1.y);
    const double c = v1.x / len1, s = v1.y / len1;
    const Vec2 r2{c * v2.x + s * v2.y, -s * v2.x + c * v2.y};
    return {r2.x / len1, r2.y / len1};
}

}  // namespace tmhf::oracle
