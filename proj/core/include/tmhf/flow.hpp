#pragma once

// Reduced Teichmüller harmonic map flow for maps u = (z, id) from the flat
// torus into dz^2 + f0(z) G_z, with domain metric g_{a,b}:
//
//   dz/dt = -f0(z) D_G E(g, G_z)[dG_z/dz] - f0'(z) E(g, G_z)
//   dg/dt = (eta^2 / 4) Re Phi(u, g)
//
// The metric equation is projected onto the (a, b) coordinates exactly, since
// Re Phi is constant, symmetric and g-tracefree, which is the tangent space
// of the unit-area flat metrics at g.

#include <stdexcept>
#include <vector>

#include "tmhf/moduli.hpp"
#include "tmhf/target.hpp"
#include "tmhf/trace.hpp"

namespace tmhf {

struct FlowVelocity {
    double z = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct MetricVelocity {
    double a = 0.0;
    double b = 0.0;
};

struct Tolerances {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double min_step = 1e-12;
};

struct FlowConfig {
    double eta = 1.0;
    double t_max = 100.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double min_step = 1e-12;
    double max_step = 10.0;
    std::vector<double> level_offsets;
    double velocity_threshold = 1e-6;
    std::size_t record_cap = 1'000'000;

    Tolerances tolerances() const { return {rel_tol, abs_tol, min_step}; }
    /// Throws DomainError on invalid settings.
    void check() const;

    friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

/// Thrown when the step-size controller would go below min_step.
class StepUnderflow : public std::runtime_error {
public:
    StepUnderflow(const std::string& what, FlowState last_good)
        : std::runtime_error(what), last_good_(last_good) {}
    const FlowState& last_good() const { return last_good_; }

private:
    FlowState last_good_;
};

double map_velocity(const CouplingProfile& profile, const ModuliCurve& curve, const FlowState& s);
MetricVelocity metric_velocity(const CouplingProfile& profile, const ModuliCurve& curve,
                               const FlowState& s, double eta);
double decay_rate(const CouplingProfile& profile, const ModuliCurve& curve, const FlowState& s,
                  double eta, double kappa = kQuadDiffNormConstant);

/// Bundles the target data and coupling eta; all members are const and pure.
class FlowSystem {
public:
    FlowSystem(CouplingProfile profile, ModuliCurve curve, double eta);

    const CouplingProfile& profile() const { return profile_; }
    const ModuliCurve& curve() const { return curve_; }
    double eta() const { return eta_; }

    FlowVelocity velocity(const FlowState& s) const;
    double energy(const FlowState& s) const;
    double energy_excess(const FlowState& s) const;
    QuadDiffCoeff hopf(const FlowState& s) const;
    double decay_rate(const FlowState& s, double kappa = kQuadDiffNormConstant) const;
    /// L^2 norm of (dz/dt, dg/dt) on the unit-area torus.
    double speed(const FlowState& s) const;
    TraceRecord record(const FlowState& s) const;

private:
    CouplingProfile profile_;
    ModuliCurve curve_;
    double eta_;
};

struct StepResult {
    FlowState state;
    double error = 0.0;  // scaled error norm; accepted iff <= 1
    bool accepted = false;
};

/// One Dormand-Prince 5(4) step of size h. Throws StepUnderflow if h < min_step.
StepResult step(const FlowSystem& system, const FlowState& state, double h, const Tolerances& tol);

/// Adaptive integration up to config.t_max with level-crossing and
/// small-velocity event detection.
FlowTrace integrate(const CouplingProfile& profile, const ModuliCurve& curve,
                    const FlowConfig& config, const FlowState& initial);

/// Default initial data (z0, G_{z0}).
FlowState on_curve_initial_state(const ModuliCurve& curve, double z0);

/// Keeps at most cap records, uniformly spaced in t, always keeping both ends.
void thin_records(std::vector<TraceRecord>& records, std::size_t cap);

}  // namespace tmhf
