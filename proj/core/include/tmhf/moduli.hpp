#pragma once

// Geometry of the Teichmüller space of the flat torus R^2/Z^2.
//
// A point (a, b) of the upper half-plane parametrizes the unit-area flat
// metric g_{a,b} = T^T T, where T = b^{-1/2} [[1, a], [0, b]] sends the
// standard lattice basis to (1, 0)/sqrt(b) and (a, b)/sqrt(b). Every
// unit-area flat metric on R^2/Z^2 has exactly one such representative.

#include <array>
#include <complex>
#include <cstdint>
#include <string>

#include "tmhf/errors.hpp"

namespace tmhf {

struct TeichPoint {
    double a = 0.0;
    double b = 1.0;

    TeichPoint() = default;
    TeichPoint(double a_, double b_);

    std::complex<double> tau() const { return {a, b}; }
    static TeichPoint from_tau(std::complex<double> tau) { return {tau.real(), tau.imag()}; }

    friend bool operator==(const TeichPoint&, const TeichPoint&) = default;
};

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]] holding metric coefficients in
/// the lattice coordinates of R^2/Z^2.
struct FlatMetric {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }
    friend bool operator==(const FlatMetric&, const FlatMetric&) = default;
};

/// Orientation-preserving mapping class of the torus, an SL(2,Z) matrix
/// [[p, q], [r, s]] acting on the upper half-plane by tau -> (p tau + q)/(r tau + s).
class MappingClass {
public:
    MappingClass() = default;
    /// Throws DomainError unless p*s - q*r == 1.
    MappingClass(std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s);

    static MappingClass identity() { return {}; }
    static MappingClass translation(std::int64_t k) { return {1, k, 0, 1}; }
    static MappingClass inversion() { return {0, -1, 1, 0}; }

    std::int64_t p() const { return m_[0]; }
    std::int64_t q() const { return m_[1]; }
    std::int64_t r() const { return m_[2]; }
    std::int64_t s() const { return m_[3]; }
    std::array<std::int64_t, 4> entries() const { return m_; }

    MappingClass inverse() const { return {s(), -q(), -r(), p()}; }
    /// Integer power; negative exponents use the inverse.
    MappingClass pow(std::int64_t n) const;

    /// Integer lattice automorphism M with metric_from_point(apply(p)) = M^T g_p M.
    std::array<std::int64_t, 4> lattice_matrix() const { return {s(), q(), r(), p()}; }

    /// Composition: (A * B).apply(x) == A.apply(B.apply(x)).
    friend MappingClass operator*(const MappingClass& lhs, const MappingClass& rhs);
    friend bool operator==(const MappingClass&, const MappingClass&) = default;

    std::string to_string() const;

private:
    struct Unchecked {};
    MappingClass(Unchecked, std::array<std::int64_t, 4> m) : m_(m) {}

    std::array<std::int64_t, 4> m_{1, 0, 0, 1};
};

/// Constant coefficient phi of the Hopf differential phi dw^2 in the chart w = T_{a,b} x.
using QuadDiffCoeff = std::complex<double>;

/// Partial derivatives of identity_energy(p, q) = E(a, b, alpha, beta).
struct EnergyGradient {
    double d_a = 0.0;
    double d_b = 0.0;
    double d_alpha = 0.0;
    double d_beta = 0.0;
};

/// Squared L^2 norm of the constant quadratic differential phi dw^2 is
/// kQuadDiffNormConstant * |phi|^2. The constant absorbs |dw^2|^2 = 4 and the
/// factor 4 between phi = <u_w, u_w> and the coefficient |u_x|^2 - |u_y|^2 - 2i<u_x,u_y>.
inline constexpr double kQuadDiffNormConstant = 64.0;

/// The L^2 metric on unit-area flat metrics equals kL2MetricFactor times the
/// hyperbolic metric (da^2 + db^2)/b^2, so L^2 speed = sqrt(2) * hyperbolic speed.
inline constexpr double kL2MetricFactor = 2.0;

FlatMetric metric_from_point(const TeichPoint& p);
FlatMetric metric_partial_a(const TeichPoint& p);
FlatMetric metric_partial_b(const TeichPoint& p);
/// M^T g M for an integer matrix M given row-major.
FlatMetric congruence(const FlatMetric& g, const std::array<std::int64_t, 4>& m);
/// Inverse of metric_from_point; requires a positive definite unit-determinant matrix.
TeichPoint point_from_metric(const FlatMetric& g);

double hyperbolic_distance(const TeichPoint& p, const TeichPoint& q);
/// Weil-Petersson distance, normalized as twice the hyperbolic distance.
double wp_distance(const TeichPoint& p, const TeichPoint& q);

/// Energy of id: (T^2, g_p) -> (T^2, g_q), i.e. cosh of the hyperbolic distance.
double identity_energy(const TeichPoint& p, const TeichPoint& q);
/// identity_energy(p, q) - 1 without cancellation.
double identity_energy_excess(const TeichPoint& p, const TeichPoint& q);
EnergyGradient identity_energy_grad(const TeichPoint& p, const TeichPoint& q);

QuadDiffCoeff hopf_coefficient(const TeichPoint& p, const TeichPoint& q, double scale);
double quad_diff_l2_norm_sq(QuadDiffCoeff phi, const TeichPoint& p,
                            double kappa = kQuadDiffNormConstant);

/// Real part of the Hopf differential, normalized as twice the tracefree part
/// of the pulled-back target metric, written as a tensor in lattice coordinates.
FlatMetric hopf_real_part_tensor(QuadDiffCoeff phi, const TeichPoint& p);

/// L^2 inner product tr(g^-1 h g^-1 k) of constant tensors on the unit-area torus.
double l2_inner(const FlatMetric& g, const FlatMetric& h, const FlatMetric& k);
/// L^2 speed of the metric when (a, b) moves with velocity (da, db).
double l2_metric_speed(const TeichPoint& p, double da, double db);

TeichPoint mapping_class_apply(const MappingClass& m, const TeichPoint& p);

struct Reduction {
    TeichPoint point;
    MappingClass map;  // mapping_class_apply(map, original) == point
};
/// Reduces into {|a| <= 1/2, a^2 + b^2 >= 1}. Boundary ties go to a <= 0.
Reduction reduce_to_fundamental_domain(const TeichPoint& p);
bool in_fundamental_domain(const TeichPoint& p, double tol = 0.0);

/// Half the length of the shortest nonzero lattice vector of (T^2, g_p).
double injectivity_radius(const TeichPoint& p);

}  // namespace tmhf
