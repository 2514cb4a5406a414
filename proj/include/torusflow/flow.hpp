#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "torusflow/curve.hpp"
#include "torusflow/layer.hpp"
#include "torusflow/ms_solver.hpp"
#include "torusflow/trace.hpp"

namespace torusflow {

enum class FlowKind { ms, sd };
enum class Scheme { rk4, ssd };

std::string to_string(FlowKind k);
std::string to_string(Scheme s);
FlowKind parse_flow_kind(const std::string& s);
Scheme parse_scheme(const std::string& s);

/// Velocity and the quantities computed alongside it at one curve.
struct VelocityEval {
    CurveSamples velocity;
    CurveSamples curvature;
    double dissipation = 0.0;
    std::optional<JumpSolution> jump;  // MS only
};

VelocityEval evaluate_velocity(const PeriodicCurve& curve, FlowKind kind, double gamma);

struct FlowState {
    double time = 0.0;
    PeriodicCurve curve;
    double target_area = 0.0;
    FlowKind flow_kind = FlowKind::sd;
    double gamma = 0.0;
    std::optional<VelocityEval> cached;  // velocity at curve, reused as the first stage

    /// Target area is the current enclosed area. gamma is forced to 0 for SD.
    static FlowState make(PeriodicCurve curve, FlowKind kind, double gamma);
    const VelocityEval& velocity();
};

struct FlowParams {
    Scheme scheme = Scheme::rk4;
    double c_cfl = 0.0;  // <= 0 selects the default for (scheme, kind)
    double area_tol = 1e-7;
    double dt_min = 1e-16;
    std::size_t max_steps = 0;  // 0 = unbounded
    bool resample = true;
    bool enforce_volume = true;
};

/// Stiffness constant used when FlowParams::c_cfl <= 0.
double default_c_cfl(Scheme scheme, FlowKind kind);

double min_marker_spacing(const PeriodicCurve& curve);

/// c_cfl h^4 (SD) or c_cfl h^3 (MS), then capped so that max|V| dt <= h/4.
double adaptive_dt(FlowState& state, const FlowParams& params = {});

struct VolumeCorrection {
    FlowState state;
    double delta = 0.0;  // total uniform normal offset applied
};
/// Safeguarded Newton on area(curve + delta nu) = target_area with derivative = perimeter.
VolumeCorrection enforce_volume(const FlowState& state, double area_tol = 1e-7);

struct StepResult {
    FlowState state;
    double volume_correction = 0.0;
};
/// One step of normal motion. Throws TopologyError / GraphError on geometric failure.
StepResult step(FlowState& state, double dt, const FlowParams& params = {});

struct StoppingMonitor {
    double eps0 = std::numeric_limits<double>::infinity();
    double delta0 = std::numeric_limits<double>::infinity();
    std::optional<PeriodicCurve> reference;
};

/// sup|psi| + sup|psi'| over the reference, psi' by spectral and by centered differences.
struct C1Distance {
    double spectral = 0.0;
    double finite_difference = 0.0;
};
C1Distance c1_distance(const PeriodicCurve& curve, const PeriodicCurve& reference);

enum class StopReason { none, graph_failure, c1_exceeded, dissipation_exceeded, dt_underflow, max_steps };
std::string to_string(StopReason r);

struct RunSinks {
    std::size_t snapshot_every = 0;
    std::function<void(const FlowState&, std::size_t step)> on_snapshot;
    /// Called with the last valid state when the geometry fails.
    std::function<void(const FlowState&)> on_failure;
};

struct RunResult {
    EnergyTrace trace;
    FlowState final_state;
    StopReason reason = StopReason::none;
    std::string message;
    std::size_t steps = 0;
};

RunResult run(const FlowState& initial, const StoppingMonitor& monitor, double t_end, const FlowParams& params = {},
              const RunSinks& sinks = {});

/// V = Laplace_s kappa.
CurveSamples sd_normal_velocity(const PeriodicCurve& curve);
CurveSamples sd_normal_velocity(FlowState& state);

}  // namespace torusflow
