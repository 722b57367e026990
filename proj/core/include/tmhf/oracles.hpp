#pragma once

// Independent reference computations used by the validation suites and the
// tests. Nothing here calls the closed forms it is meant to check.

#include <complex>
#include <functional>

#include "tmhf/moduli.hpp"

namespace tmhf::oracle {

/// 1/2 of the integral of |du|^2 for u = id: (T^2, g_p) -> (T^2, g_q), by a
/// midpoint rule over the unit cell and finite-difference derivatives of the
/// linear map T_q T_p^{-1} in the chart w = T_p x.
double energy_quadrature(const TeichPoint& p, const TeichPoint& q, int nodes = 16);

/// Same quadrature for 1/4 (|u_1|^2 - |u_2|^2 - 2i <u_1, u_2>) with target scale * g_q.
std::complex<double> hopf_quadrature(const TeichPoint& p, const TeichPoint& q, double scale,
                                     int nodes = 16);

/// Half the shortest nonzero vector m e_1 + n e_2 of the lattice T_p Z^2 over |m|, |n| <= bound.
double shortest_vector_half(const TeichPoint& p, int bound = 50);

/// Upper half-plane distance from the cross-ratio form
/// log((|p - conj q| + |p - q|) / (|p - conj q| - |p - q|)).
double hyperbolic_distance_log(const TeichPoint& p, const TeichPoint& q);

/// Fourth-order central difference of f at x.
double central_diff4(const std::function<double(double)>& f, double x, double h);
/// Second-order central difference of f at x.
double central_diff2(const std::function<double(double)>& f, double x, double h);

/// Composition of the lattice map M with T_p, renormalized back to a point of H.
/// Returns the Teichmüller point whose metric is M^T g_p M.
TeichPoint lattice_pullback(const TeichPoint& p, const std::array<std::int64_t, 4>& m);

}  // namespace tmhf::oracle
