#pragma once

// Target-manifold data: the prescribed curve s -> G_s of flat metrics with its
// deck transformation, and the coupling function f(x, y) whose restriction
// f0(z) = f(1, e^z) weights the torus factor of the target metric
// dz^2 + f0(z) G_z.

#include <string>
#include <string_view>
#include <vector>

#include "tmhf/moduli.hpp"

namespace tmhf {

enum class CurveKind { dehn_twist, closed_loop, spline };

/// Prescribed curve of metrics with G_{s+1} = deck^{-1} . G_s.
struct ModuliCurve {
    CurveKind kind = CurveKind::dehn_twist;

    // dehn_twist: G_s = (base_a + s, base_height)
    double base_a = 0.0;
    double base_height = 1.0;

    // closed_loop: G_s = center + radius (cos 2 pi s, sin 2 pi s)
    TeichPoint center{0.0, 2.0};
    double radius = 0.5;

    // spline: knots at s = k/m, k = 0..m (m + 1 points; the last one closes the
    // period and should equal deck^{-1} . control[0]). Uniform Catmull-Rom.
    std::vector<TeichPoint> control;

    MappingClass deck;

    static ModuliCurve dehn_twist(double base_height = 1.0, double base_a = 0.0);
    static ModuliCurve closed_loop(TeichPoint center, double radius);
    static ModuliCurve spline(std::vector<TeichPoint> control, MappingClass deck = {});

    friend bool operator==(const ModuliCurve&, const ModuliCurve&) = default;
};

struct CurveTangent {
    double d_alpha = 0.0;
    double d_beta = 0.0;
};

TeichPoint curve_eval(const ModuliCurve& curve, double s);
CurveTangent curve_deriv(const ModuliCurve& curve, double s);

struct CurveValidation {
    bool passed = true;
    double max_periodicity_violation = 0.0;  // hyperbolic distance
    double where_s = 0.0;                    // s of the largest violation
    double min_height = 0.0;                 // smallest b over the grid
    std::vector<std::string> messages;
};

/// Checks G_{s+1} = deck^{-1} G_s on grid_size points of [0, 1) and b >= b_min.
CurveValidation validate_curve(const ModuliCurve& curve, int grid_size, double b_min = 1e-6,
                               double tol = 1e-9);

enum class ProfileKind { staircase, analytic_strip, converging_well };

/// Outer function h in f(x, y) = 1 + h(y e^{-rho(log x)}).
/// exponential: h(s) = exp(-s).  power: h(s) = (1 + s)^(-tail_exponent).
enum class TailKind { exponential, power };

struct CouplingProfile {
    ProfileKind kind = ProfileKind::staircase;
    double width = 0.1;  // half-width of the flat pieces of rho, in (0, 1/2)
    TailKind tail = TailKind::exponential;
    double tail_exponent = 1.5;
    double well_center = 0.0;  // converging_well only

    /// Throws DomainError on out-of-range parameters.
    void check() const;

    friend bool operator==(const CouplingProfile&, const CouplingProfile&) = default;
};

double rho_eval(const CouplingProfile& profile, double s);
double rho_deriv(const CouplingProfile& profile, double s);

/// Coupling function on the upper half-plane, values in [1, 2].
double f_eval(const CouplingProfile& profile, double x, double y);

double f0_eval(const CouplingProfile& profile, double z);
/// f0(z) - 1 computed without cancellation.
double f0_excess(const CouplingProfile& profile, double z);
double f0_deriv(const CouplingProfile& profile, double z);

/// f0(z) * identity_energy(p, G_z).
double potential_energy(const CouplingProfile& profile, const ModuliCurve& curve, double z,
                        const TeichPoint& p);
/// potential_energy - 1, accurate when the energy is close to 1.
double potential_energy_excess(const CouplingProfile& profile, const ModuliCurve& curve,
                               double z, const TeichPoint& p);

std::string_view to_string(CurveKind kind);
std::string_view to_string(ProfileKind kind);
std::string_view to_string(TailKind kind);
CurveKind curve_kind_from_string(std::string_view text);
ProfileKind profile_kind_from_string(std::string_view text);
TailKind tail_kind_from_string(std::string_view text);

}  // namespace tmhf
