#pragma once

#include "mbsat/models.hpp"
#include "mbsat/random.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbsat {

struct Particle {
    TargetState state;
    double weight = 0.0;
};

/// Weighted particle approximation of a single-target spatial density.
/// Invariant (after normalize()): at least one particle, weights sum to 1.
struct ParticleDensity {
    std::vector<Particle> particles;

    [[nodiscard]] std::size_t size() const { return particles.size(); }
    [[nodiscard]] double weight_sum() const;
    [[nodiscard]] double effective_sample_size() const;
    [[nodiscard]] TargetState mean() const;
    [[nodiscard]] Eigen::Matrix4d covariance() const;
    /// Rescales weights to sum to one; throws std::logic_error on an empty or zero-mass cloud.
    void normalize();
};

/// Analytic form of a fresh birth density: position uniform over the arena,
/// velocity zero-mean Gaussian. Lets the update integrate measurement
/// likelihoods against the birth prior by quadrature instead of relying on
/// the sparse uniform particles.
struct UniformBirthPrior {
    Arena arena;
    double velocity_std = 3.0;
};

struct BernoulliComponent {
    double r = 0.0;
    ParticleDensity density;
    /// Set while the density is still exactly the birth prior.
    std::optional<UniformBirthPrior> birth_prior;
    /// Measurement-updated component whose likelihood mass underflowed; r is 0.
    bool degenerate = false;
};

struct MultiBernoulli {
    std::vector<BernoulliComponent> components;

    [[nodiscard]] std::size_t size() const { return components.size(); }
    [[nodiscard]] bool empty() const { return components.empty(); }
    [[nodiscard]] double total_existence() const;
    [[nodiscard]] std::vector<double> existence() const;
};

struct BirthConfig {
    int n_birth = 1;
    double r_birth = 0.03;
    int particles_per_birth = 1000;
    double velocity_std = 3.0;

    void validate() const;
};

struct FilterConfig {
    double prune_threshold = 1e-4;
    std::size_t max_components = 100;
    /// Resample when ESS < resample_threshold * particle count.
    double resample_threshold = 0.5;
    /// Particle budget of a measurement-updated component.
    int particles_per_component = 500;

    void validate() const;
};

/// Sensing, measurement-noise and clutter models as seen by one agent's filter.
struct SensorModel {
    SensingConfig sensing;
    MeasurementNoiseConfig noise;
    ClutterConfig clutter;
};

struct CardinalityEstimate {
    int n_hat = 0;
    double sigma = 0.0;
    double sigma_tilde = 1.0;
};

struct StateEstimate {
    CardinalityEstimate cardinality;
    std::vector<TargetState> states;
};

/// Persisting components scaled by the survival probability and propagated
/// through the motion model, followed by `n_birth` uniform birth components.
MultiBernoulli predict(const MultiBernoulli& prior, const MotionConfig& motion, const BirthConfig& birth,
                       const Arena& arena, RandomStream& rng);

/// Multi-Bernoulli measurement update: one legacy component per predicted
/// component followed by one component per measurement (in input order).
/// Measurement-component clouds are resampled down to
/// `cfg.particles_per_component`; each draws from a substream keyed on the
/// measurement value so the result does not depend on the order of Z.
MultiBernoulli update(const MultiBernoulli& pred, const MeasurementSet& z, const AgentState& s,
                      const SensorModel& sensor, const FilterConfig& cfg, RandomStream& rng);

/// Existence probabilities the update would produce (same order as update),
/// without building the updated densities. Deterministic.
std::vector<double> updated_existence(const MultiBernoulli& pred, const MeasurementSet& z,
                                      const AgentState& s, const SensorModel& sensor);

/// n_hat = round(sum r), sigma = sum r(1-r), sigma_tilde = 4 sigma / v (1 when v = 0).
CardinalityEstimate cardinality_statistics(std::span<const double> r);

/// EAP cardinality plus the weighted-mean states of the n_hat most likely
/// components (ties broken by lower index).
StateEstimate estimate(const MultiBernoulli& mb);

/// States of the components with r > 0.5, in component order.
std::vector<TargetState> predict_estimate(const MultiBernoulli& pred);

/// Drops components below the prune threshold, keeps the max_components most
/// likely, and systematically resamples clouds whose ESS fell below threshold.
MultiBernoulli prune_and_cap(const MultiBernoulli& mb, const FilterConfig& cfg, RandomStream& rng);

/// Systematic resampling to `count` equally weighted particles.
std::vector<Particle> systematic_resample(const std::vector<Particle>& particles, std::size_t count,
                                          RandomStream& rng);

/// JSON snapshot of a belief: per-component r, particle count, ESS, mean and
/// standard deviations, plus the cardinality statistics.
std::string belief_snapshot(const MultiBernoulli& mb);

} // namespace mbsat
