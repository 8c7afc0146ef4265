#pragma once

#include "mbsat/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace mbsat {

// ---- Kinematic state ----

/// Target state [px, vx, py, vy]. Positions in meters, velocities in m/s.
struct TargetState {
    double px = 0.0;
    double vx = 0.0;
    double py = 0.0;
    double vy = 0.0;

    [[nodiscard]] Eigen::Vector4d vector() const { return {px, vx, py, vy}; }
    [[nodiscard]] Eigen::Vector2d position() const { return {px, py}; }
    static TargetState from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

    friend bool operator==(const TargetState&, const TargetState&) = default;
};

/// Agent position in the plane.
struct AgentState {
    double sx = 0.0;
    double sy = 0.0;

    [[nodiscard]] Eigen::Vector2d position() const { return {sx, sy}; }

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Range-bearing measurement; bearing in (-pi, pi], range in meters.
struct Measurement {
    double bearing = 0.0;
    double range = 0.0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Unordered; every consumer must be permutation invariant.
using MeasurementSet = std::vector<Measurement>;

double wrap_angle_slow(double a);

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
    return a > -std::numbers::pi && a <= std::numbers::pi ? a : wrap_angle_slow(a);
}

// ---- Configuration ----

/// Axis-aligned surveillance region [0, width] x [0, height].
struct Arena {
    double width = 500.0;
    double height = 500.0;

    [[nodiscard]] double area() const { return width * height; }
    [[nodiscard]] double diagonal() const { return std::hypot(width, height); }
    [[nodiscard]] bool contains(double x, double y, double margin = 0.0) const
    {
        return x >= -margin && x <= width + margin && y >= -margin && y <= height + margin;
    }
    [[nodiscard]] AgentState clamp(AgentState s) const;
    void validate() const;
};

/// Linear-Gaussian target motion x' = F x + v, v ~ N(0, Q), with a
/// state-independent survival probability.
class MotionConfig {
public:
    MotionConfig(Eigen::Matrix4d F, Eigen::Matrix4d Q, double T, double survival);

    /// Near constant velocity model with sampling interval T. `q_scale`
    /// multiplies the unit-intensity process noise.
    static MotionConfig constant_velocity(double T = 1.0, double survival = 0.99, double q_scale = 1.0);

    [[nodiscard]] const Eigen::Matrix4d& F() const { return F_; }
    [[nodiscard]] const Eigen::Matrix4d& Q() const { return Q_; }
    [[nodiscard]] double T() const { return T_; }
    [[nodiscard]] double survival() const { return survival_; }
    /// Matrix L with L L^T = Q (symmetric square root; valid for singular Q).
    [[nodiscard]] const Eigen::Matrix4d& noise_factor() const { return noise_factor_; }
    [[nodiscard]] bool noiseless() const { return noiseless_; }

private:
    Eigen::Matrix4d F_;
    Eigen::Matrix4d Q_;
    Eigen::Matrix4d noise_factor_;
    double T_;
    double survival_;
    bool noiseless_;
};

/// Distance-dependent detection probability: flat pd_max inside r0, then a
/// linear falloff of slope eta.
struct SensingConfig {
    double pd_max = 0.99;
    double eta = 23e-4;
    double r0 = 30.0;

    /// Distance beyond which detection probability is zero.
    [[nodiscard]] double zero_range() const { return r0 + pd_max / eta; }
    void validate() const;
};

/// Range-dependent Gaussian measurement noise.
struct MeasurementNoiseConfig {
    double phi0 = 2.0 * std::numbers::pi / 180.0;
    double beta_phi = 1e-5;
    double zeta0 = 1.0;
    double beta_zeta = 5e-5;

    [[nodiscard]] double bearing_std(double d) const { return phi0 + beta_phi * d; }
    [[nodiscard]] double range_std(double d) const { return zeta0 + beta_zeta * d * d; }
    void validate() const;
};

/// Poisson clutter, uniform over a bearing x range box.
struct ClutterConfig {
    double rate = 10.0;
    double bearing_min = -std::numbers::pi;
    double bearing_max = std::numbers::pi;
    double range_min = 0.0;
    double range_max = 500.0 * std::numbers::sqrt2;

    /// Default support: full bearing circle, range up to the arena diagonal.
    static ClutterConfig for_arena(double rate, const Arena& arena);

    [[nodiscard]] double support_volume() const
    {
        return (bearing_max - bearing_min) * (range_max - range_min);
    }
    /// kappa(z) = rate * f_c(z); zero outside the support.
    [[nodiscard]] double intensity(const Measurement& z) const;
    void validate() const;
};

/// Control lattice: n_r rings of radial step delta_r, n_theta headings.
struct AgentMotionConfig {
    double delta_r = 5.0;
    int n_r = 2;
    int n_theta = 8;

    [[nodiscard]] std::size_t control_count() const
    {
        return static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta) + 1;
    }
    void validate() const;
};

// ---- Operations ----

TargetState step_target(const TargetState& x, const MotionConfig& cfg, RandomStream& rng);

double detection_probability(double distance, const SensingConfig& cfg);
double detection_probability(const TargetState& x, const AgentState& s, const SensingConfig& cfg);

/// Noise-free measurement h(x, s). Bearing of co-located points is reported as 0.
Measurement noise_free_measurement(const TargetState& x, const AgentState& s);

/// Noisy measurement; throws DomainError when target and agent are co-located.
Measurement measure(const TargetState& x, const AgentState& s, const MeasurementNoiseConfig& noise,
                    RandomStream& rng);

double measurement_loglikelihood(const Measurement& z, const TargetState& x, const AgentState& s,
                                 const MeasurementNoiseConfig& noise);

MeasurementSet generate_measurements(const std::vector<TargetState>& targets, const AgentState& s,
                                     const SensingConfig& sensing, const MeasurementNoiseConfig& noise,
                                     const ClutterConfig& clutter, RandomStream& rng);

/// Stay action first, then rings by increasing radius, headings by increasing
/// angle. Points outside the arena are clamped onto its boundary.
std::vector<AgentState> admissible_controls(const AgentState& s, const AgentMotionConfig& cfg,
                                            const Arena& arena);

// ---- Ground truth ----

struct Waypoint {
    int k = 0;
    double px = 0.0;
    double py = 0.0;
};

/// Scripted target life: alive for birth <= k <= death. With waypoints the
/// position is linearly interpolated between them; otherwise the state is
/// propagated with the motion model from `initial`.
struct ScheduledTarget {
    int birth = 0;
    int death = 0;
    TargetState initial;
    std::vector<Waypoint> waypoints;
};

struct LiveTarget {
    int id = 0;
    TargetState state;
};

/// Ground-truth world: a birth/death schedule plus the currently live targets.
struct GroundTruth {
    std::vector<ScheduledTarget> schedule;
    std::vector<LiveTarget> live;
    bool stochastic_survival = false;
    /// Targets further than this outside the arena are removed.
    double arena_margin = 0.0;

    [[nodiscard]] std::vector<TargetState> states() const;
};

/// Advances the world to timestep k: removes targets past their death time,
/// failing the survival draw (if enabled) or leaving the arena; steps the
/// survivors; adds targets born at k at their scripted state.
void step_ground_truth(GroundTruth& world, int k, const MotionConfig& cfg, const Arena& arena,
                       RandomStream& rng);

} // namespace mbsat
