#include "mbsat/models.hpp"

#include "mbsat/errors.hpp"

#include <algorithm>
#include <string>

namespace mbsat {

double wrap_angle_slow(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(a + std::numbers::pi, two_pi);
    if (w <= 0.0) {
        w += two_pi;
    }
    return w - std::numbers::pi;
}

AgentState Arena::clamp(AgentState s) const
{
    s.sx = std::clamp(s.sx, 0.0, width);
    s.sy = std::clamp(s.sy, 0.0, height);
    return s;
}

void Arena::validate() const
{
    if (!(width > 0.0) || !(height > 0.0)) {
        throw ConfigError("arena: width and height must be positive");
    }
}

MotionConfig::MotionConfig(Eigen::Matrix4d F, Eigen::Matrix4d Q, double T, double survival)
    : F_(std::move(F)), Q_(std::move(Q)), T_(T), survival_(survival)
{
    if (!(survival_ >= 0.0 && survival_ <= 1.0)) {
        throw ConfigError("motion: survival probability must lie in [0, 1]");
    }
    if (!Q_.isApprox(Q_.transpose(), 1e-12)) {
        throw ConfigError("motion: Q must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(Q_);
    const Eigen::Vector4d ev = eig.eigenvalues();
    if (ev.minCoeff() < -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
        throw ConfigError("motion: Q must be positive semi-definite");
    }
    noise_factor_ = eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal()
                    * eig.eigenvectors().transpose();
    noiseless_ = Q_.isZero(0.0);
}

MotionConfig MotionConfig::constant_velocity(double T, double survival, double q_scale)
{
    if (!(T > 0.0)) {
        throw ConfigError("motion: sampling interval must be positive");
    }
    if (!(q_scale >= 0.0)) {
        throw ConfigError("motion: process noise scale must be non-negative");
    }
    Eigen::Matrix4d F;
    F << 1, T, 0, 0,
         0, 1, 0, 0,
         0, 0, 1, T,
         0, 0, 0, 1;
    Eigen::Matrix4d Q;
    Q << T / 3, T / 2, 0, 0,
         T / 2, T, 0, 0,
         0, 0, T / 3, T / 2,
         0, 0, T / 2, T;
    return MotionConfig(F, q_scale * Q, T, survival);
}

void SensingConfig::validate() const
{
    if (!(pd_max > 0.0 && pd_max <= 1.0)) {
        throw ConfigError("sensing: pd_max must lie in (0, 1]");
    }
    if (!(eta > 0.0)) {
        throw ConfigError("sensing: eta must be positive");
    }
    if (!(r0 > 0.0)) {
        throw ConfigError("sensing: r0 must be positive");
    }
}

void MeasurementNoiseConfig::validate() const
{
    if (!(phi0 > 0.0 && beta_phi > 0.0 && zeta0 > 0.0 && beta_zeta > 0.0)) {
        throw ConfigError("noise: phi0, beta_phi, zeta0 and beta_zeta must be positive");
    }
}

ClutterConfig ClutterConfig::for_arena(double rate, const Arena& arena)
{
    ClutterConfig c;
    c.rate = rate;
    c.range_max = arena.diagonal();
    return c;
}

double ClutterConfig::intensity(const Measurement& z) const
{
    if (z.bearing < bearing_min || z.bearing > bearing_max || z.range < range_min || z.range > range_max) {
        return 0.0;
    }
    return rate / support_volume();
}

void ClutterConfig::validate() const
{
    if (!(rate >= 0.0)) {
        throw ConfigError("clutter: rate must be non-negative");
    }
    if (!(bearing_max > bearing_min) || !(range_max > range_min) || range_min < 0.0) {
        throw ConfigError("clutter: support must be a non-empty bearing x range box with range >= 0");
    }
}

void AgentMotionConfig::validate() const
{
    if (n_r < 0 || n_theta < 1) {
        throw ConfigError("agent_motion: need n_r >= 0 and n_theta >= 1");
    }
    if (n_r > 0 && !(delta_r > 0.0)) {
        throw ConfigError("agent_motion: delta_r must be positive");
    }
}

TargetState step_target(const TargetState& x, const MotionConfig& cfg, RandomStream& rng)
{
    Eigen::Vector4d next = cfg.F() * x.vector();
    if (!cfg.noiseless()) {
        Eigen::Vector4d w;
        for (int i = 0; i < 4; ++i) {
            w[i] = rng.normal();
        }
        next += cfg.noise_factor() * w;
    }
    return TargetState::from_vector(next);
}

double detection_probability(double distance, const SensingConfig& cfg)
{
    if (distance < cfg.r0) {
        return cfg.pd_max;
    }
    return std::max(0.0, cfg.pd_max - cfg.eta * (distance - cfg.r0));
}

double detection_probability(const TargetState& x, const AgentState& s, const SensingConfig& cfg)
{
    const double dx = x.px - s.sx;
    const double dy = x.py - s.sy;
    return detection_probability(std::sqrt(dx * dx + dy * dy), cfg);
}

Measurement noise_free_measurement(const TargetState& x, const AgentState& s)
{
    const double dx = x.px - s.sx;
    const double dy = x.py - s.sy;
    return {std::atan2(dy, dx), std::sqrt(dx * dx + dy * dy)};
}

Measurement measure(const TargetState& x, const AgentState& s, const MeasurementNoiseConfig& noise,
                    RandomStream& rng)
{
    const Measurement h = noise_free_measurement(x, s);
    if (!(h.range > 0.0)) {
        throw DomainError("measure: target and agent are co-located, bearing undefined");
    }
    Measurement z;
    z.bearing = wrap_angle(h.bearing + rng.normal(0.0, noise.bearing_std(h.range)));
    z.range = h.range + rng.normal(0.0, noise.range_std(h.range));
    return z;
}

double measurement_loglikelihood(const Measurement& z, const TargetState& x, const AgentState& s,
                                 const MeasurementNoiseConfig& noise)
{
    const Measurement h = noise_free_measurement(x, s);
    const double sb = noise.bearing_std(h.range);
    const double sr = noise.range_std(h.range);
    const double eb = wrap_angle(z.bearing - h.bearing) / sb;
    const double er = (z.range - h.range) / sr;
    return -std::log(2.0 * std::numbers::pi * sb * sr) - 0.5 * (eb * eb + er * er);
}

MeasurementSet generate_measurements(const std::vector<TargetState>& targets, const AgentState& s,
                                     const SensingConfig& sensing, const MeasurementNoiseConfig& noise,
                                     const ClutterConfig& clutter, RandomStream& rng)
{
    MeasurementSet z;
    for (const auto& x : targets) {
        const double pd = detection_probability(x, s, sensing);
        if (rng.uniform() < pd) {
            z.push_back(measure(x, s, noise, rng));
        }
    }
    const std::uint64_t n_clutter = rng.poisson(clutter.rate);
    for (std::uint64_t i = 0; i < n_clutter; ++i) {
        // Uniform over (bearing_min, bearing_max]; wrap keeps the default (-pi, pi] convention.
        const double b = clutter.bearing_max - rng.uniform() * (clutter.bearing_max - clutter.bearing_min);
        const double r = rng.uniform(clutter.range_min, clutter.range_max);
        z.push_back({wrap_angle(b), r});
    }
    return z;
}

std::vector<AgentState> admissible_controls(const AgentState& s, const AgentMotionConfig& cfg,
                                            const Arena& arena)
{
    std::vector<AgentState> out;
    out.reserve(cfg.control_count());
    out.push_back(arena.clamp(s));
    const double dtheta = 2.0 * std::numbers::pi / cfg.n_theta;
    for (int l1 = 1; l1 <= cfg.n_r; ++l1) {
        for (int l2 = 0; l2 < cfg.n_theta; ++l2) {
            const double radius = l1 * cfg.delta_r;
            const double angle = l2 * dtheta;
            out.push_back(arena.clamp({s.sx + radius * std::cos(angle), s.sy + radius * std::sin(angle)}));
        }
    }
    return out;
}

std::vector<TargetState> GroundTruth::states() const
{
    std::vector<TargetState> out;
    out.reserve(live.size());
    for (const auto& t : live) {
        out.push_back(t.state);
    }
    return out;
}

namespace {

TargetState waypoint_state(const ScheduledTarget& t, int k)
{
    const auto& wp = t.waypoints;
    if (wp.size() == 1 || k <= wp.front().k) {
        return {wp.front().px, 0.0, wp.front().py, 0.0};
    }
    for (std::size_t i = 1; i < wp.size(); ++i) {
        if (k <= wp[i].k) {
            const auto& a = wp[i - 1];
            const auto& b = wp[i];
            const double span = static_cast<double>(b.k - a.k);
            const double f = (k - a.k) / span;
            return {a.px + f * (b.px - a.px), (b.px - a.px) / span, a.py + f * (b.py - a.py),
                    (b.py - a.py) / span};
        }
    }
    return {wp.back().px, 0.0, wp.back().py, 0.0};
}

} // namespace

void step_ground_truth(GroundTruth& world, int k, const MotionConfig& cfg, const Arena& arena,
                       RandomStream& rng)
{
    std::vector<LiveTarget> next;
    next.reserve(world.live.size());
    for (const auto& t : world.live) {
        const ScheduledTarget& sched = world.schedule.at(static_cast<std::size_t>(t.id));
        if (k > sched.death) {
            continue;
        }
        if (world.stochastic_survival && rng.uniform() >= cfg.survival()) {
            continue;
        }
        LiveTarget moved = t;
        moved.state = sched.waypoints.empty() ? step_target(t.state, cfg, rng) : waypoint_state(sched, k);
        if (!arena.contains(moved.state.px, moved.state.py, world.arena_margin)) {
            continue;
        }
        next.push_back(moved);
    }
    for (std::size_t i = 0; i < world.schedule.size(); ++i) {
        const ScheduledTarget& sched = world.schedule[i];
        if (sched.birth == k && k <= sched.death) {
            const TargetState x = sched.waypoints.empty() ? sched.initial : waypoint_state(sched, k);
            next.push_back({static_cast<int>(i), x});
        }
    }
    world.live = std::move(next);
}

} // namespace mbsat
