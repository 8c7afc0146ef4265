#include "mbsat/rfs.hpp"

#include "mbsat/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mbsat {

// ---- ParticleDensity ----

double ParticleDensity::weight_sum() const
{
    double s = 0.0;
    for (const auto& p : particles) {
        s += p.weight;
    }
    return s;
}

double ParticleDensity::effective_sample_size() const
{
    double s = 0.0;
    double s2 = 0.0;
    for (const auto& p : particles) {
        s += p.weight;
        s2 += p.weight * p.weight;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

TargetState ParticleDensity::mean() const
{
    Eigen::Vector4d m = Eigen::Vector4d::Zero();
    double s = 0.0;
    for (const auto& p : particles) {
        m += p.weight * p.state.vector();
        s += p.weight;
    }
    return TargetState::from_vector(s > 0.0 ? Eigen::Vector4d(m / s) : m);
}

Eigen::Matrix4d ParticleDensity::covariance() const
{
    const Eigen::Vector4d m = mean().vector();
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    double s = 0.0;
    for (const auto& p : particles) {
        const Eigen::Vector4d d = p.state.vector() - m;
        c += p.weight * d * d.transpose();
        s += p.weight;
    }
    return s > 0.0 ? Eigen::Matrix4d(c / s) : c;
}

void ParticleDensity::normalize()
{
    const double s = weight_sum();
    if (particles.empty() || !(s > 0.0) || !std::isfinite(s)) {
        throw std::logic_error("particle density has no mass");
    }
    for (auto& p : particles) {
        p.weight /= s;
    }
}

double MultiBernoulli::total_existence() const
{
    double s = 0.0;
    for (const auto& c : components) {
        s += c.r;
    }
    return s;
}

std::vector<double> MultiBernoulli::existence() const
{
    std::vector<double> r;
    r.reserve(components.size());
    for (const auto& c : components) {
        r.push_back(c.r);
    }
    return r;
}

void BirthConfig::validate() const
{
    if (n_birth < 0 || particles_per_birth < 1) {
        throw ConfigError("birth: n_birth must be >= 0 and particles_per_birth >= 1");
    }
    if (!(r_birth > 0.0 && r_birth < 1.0)) {
        throw ConfigError("birth: r_birth must lie in (0, 1)");
    }
    if (!(velocity_std >= 0.0)) {
        throw ConfigError("birth: velocity_std must be non-negative");
    }
}

void FilterConfig::validate() const
{
    if (!(prune_threshold >= 0.0 && prune_threshold < 0.5)) {
        throw ConfigError("filter: prune_threshold must lie in [0, 0.5)");
    }
    if (max_components < 1) {
        throw ConfigError("filter: max_components must be >= 1");
    }
    if (!(resample_threshold >= 0.0 && resample_threshold <= 1.0)) {
        throw ConfigError("filter: resample_threshold must lie in [0, 1]");
    }
    if (particles_per_component < 1) {
        throw ConfigError("filter: particles_per_component must be >= 1");
    }
}

// ---- internals ----

namespace {

constexpr double kGate = 10.0;          // likelihood treated as zero beyond this many sigmas
constexpr double kOddsFloor = 1e-12;    // 1 - r floor for the r/(1-r) mixture weights
constexpr double kDriftTolerance = 1e-12;

double checked_probability(double r)
{
    if (r < -kDriftTolerance || r > 1.0 + kDriftTolerance || !std::isfinite(r)) {
        throw std::logic_error("existence probability left [0, 1]: " + std::to_string(r));
    }
    return std::clamp(r, 0.0, 1.0);
}

double likelihood(const Measurement& z, double range, double bearing, const MeasurementNoiseConfig& noise)
{
    const double sr = noise.range_std(range);
    const double er = (z.range - range) / sr;
    if (std::abs(er) > kGate) {
        return 0.0;
    }
    const double sb = noise.bearing_std(range);
    const double eb = wrap_angle(z.bearing - bearing) / sb;
    if (std::abs(eb) > kGate) {
        return 0.0;
    }
    return std::exp(-0.5 * (eb * eb + er * er)) / (2.0 * std::numbers::pi * sb * sr);
}

double normal_pdf(double x, double sd)
{
    const double e = x / sd;
    return std::exp(-0.5 * e * e) / (std::sqrt(2.0 * std::numbers::pi) * sd);
}

struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Physicists' Gauss-Hermite rule by Golub-Welsch.
GaussHermite make_gauss_hermite(int n)
{
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    GaussHermite gh;
    for (int i = 0; i < n; ++i) {
        gh.nodes.push_back(eig.eigenvalues()[i]);
        const double v0 = eig.eigenvectors()(0, i);
        gh.weights.push_back(std::sqrt(std::numbers::pi) * v0 * v0);
    }
    return gh;
}

const GaussHermite& gauss_hermite()
{
    static const GaussHermite gh = make_gauss_hermite(12);
    return gh;
}

/// Polar proposal centred on the measurement, in agent-relative (bearing, range).
struct PolarProposal {
    double bearing_sd;
    double range_sd;
};

PolarProposal proposal_for(const Measurement& z, const MeasurementNoiseConfig& noise)
{
    const double r = std::max(z.range, 0.0);
    return {noise.bearing_std(r), noise.range_std(r)};
}

/// Integrand of <p_birth, g(z|.) pD> over (bearing, range), divided by the proposal density.
double birth_importance_ratio(double theta, double rho, const Measurement& z, const AgentState& s,
                              const UniformBirthPrior& prior, const SensorModel& sensor, const PolarProposal& q)
{
    if (!(rho > 0.0)) {
        return 0.0;
    }
    const double x = s.sx + rho * std::cos(theta);
    const double y = s.sy + rho * std::sin(theta);
    if (!prior.arena.contains(x, y)) {
        return 0.0;
    }
    const double pd = detection_probability(rho, sensor.sensing);
    if (pd <= 0.0) {
        return 0.0;
    }
    const double g = normal_pdf(wrap_angle(z.bearing - theta), sensor.noise.bearing_std(rho))
                     * normal_pdf(z.range - rho, sensor.noise.range_std(rho));
    const double qd = normal_pdf(wrap_angle(theta - z.bearing), q.bearing_sd) * normal_pdf(rho - z.range, q.range_sd);
    if (!(qd > 0.0)) {
        return 0.0;
    }
    return pd * rho * g / (prior.arena.area() * qd);
}

/// <p_birth, g(z|.) pD> by tensor Gauss-Hermite quadrature over the polar proposal.
double birth_likelihood_mass(const UniformBirthPrior& prior, const Measurement& z, const AgentState& s,
                             const SensorModel& sensor)
{
    const auto& gh = gauss_hermite();
    const PolarProposal q = proposal_for(z, sensor.noise);
    double sum = 0.0;
    for (std::size_t m = 0; m < gh.nodes.size(); ++m) {
        const double theta = z.bearing + std::numbers::sqrt2 * q.bearing_sd * gh.nodes[m];
        for (std::size_t n = 0; n < gh.nodes.size(); ++n) {
            const double rho = z.range + std::numbers::sqrt2 * q.range_sd * gh.nodes[n];
            sum += gh.weights[m] * gh.weights[n] * birth_importance_ratio(theta, rho, z, s, prior, sensor, q);
        }
    }
    return sum / std::numbers::pi;
}

/// Importance samples of the birth prior restricted by one measurement; weights unnormalized.
std::vector<Particle> sample_birth_given_measurement(const UniformBirthPrior& prior, const Measurement& z,
                                                     const AgentState& s, const SensorModel& sensor,
                                                     std::size_t count, RandomStream& rng)
{
    const PolarProposal q = proposal_for(z, sensor.noise);
    std::vector<Particle> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double theta = z.bearing + q.bearing_sd * rng.normal();
        const double rho = z.range + q.range_sd * rng.normal();
        const double vx = rng.normal(0.0, prior.velocity_std);
        const double vy = rng.normal(0.0, prior.velocity_std);
        const double w = birth_importance_ratio(theta, rho, z, s, prior, sensor, q);
        if (w > 0.0) {
            out.push_back({{s.sx + rho * std::cos(theta), vx, s.sy + rho * std::sin(theta), vy}, w});
        }
    }
    return out;
}

struct Contribution {
    std::uint32_t component;
    std::uint32_t particle;
    double mass;   // w * pD * g
};

struct UpdateTerms {
    std::vector<double> a;                                  // <p_i, pD>
    std::vector<std::vector<double>> b;                     // [z][i] = <p_i, g pD>
    std::vector<std::vector<double>> pd;                    // [i][particle], only when collecting
    std::vector<std::vector<Contribution>> contributions;   // [z], particle components only
};

UpdateTerms compute_terms(const MultiBernoulli& pred, const MeasurementSet& zs, const AgentState& s,
                          const SensorModel& sensor, bool collect)
{
    const std::size_t v = pred.size();
    UpdateTerms t;
    t.a.assign(v, 0.0);
    t.b.assign(zs.size(), std::vector<double>(v, 0.0));
    if (collect) {
        t.pd.resize(v);
        t.contributions.resize(zs.size());
    }
    const double zero_range = sensor.sensing.zero_range();

    std::vector<double> range;
    std::vector<double> bearing;
    std::vector<double> pd;
    for (std::size_t i = 0; i < v; ++i) {
        const auto& comp = pred.components[i];
        const auto& ps = comp.density.particles;
        range.resize(ps.size());
        pd.resize(ps.size());
        const bool birth = comp.birth_prior.has_value();
        double a = 0.0;
        double d_lo = std::numeric_limits<double>::infinity();
        double d_hi = 0.0;
        for (std::size_t p = 0; p < ps.size(); ++p) {
            const double dx = ps[p].state.px - s.sx;
            const double dy = ps[p].state.py - s.sy;
            range[p] = std::sqrt(dx * dx + dy * dy);
            pd[p] = detection_probability(range[p], sensor.sensing);
            a += ps[p].weight * pd[p];
            d_lo = std::min(d_lo, range[p]);
            d_hi = std::max(d_hi, range[p]);
        }
        t.a[i] = a;
        if (collect) {
            t.pd[i] = pd;
        }
        if (birth) {
            for (std::size_t j = 0; j < zs.size(); ++j) {
                t.b[j][i] = birth_likelihood_mass(*comp.birth_prior, zs[j], s, sensor);
            }
            continue;
        }

        // Range interval and angular spread of the cloud; a measurement outside
        // every particle's gate is skipped without visiting the particles.
        const double range_gate = kGate * sensor.noise.range_std(d_hi);
        const bool any_in_range = std::any_of(zs.begin(), zs.end(), [&](const Measurement& z) {
            return z.range >= d_lo - range_gate && z.range <= d_hi + range_gate;
        });
        if (a <= 0.0 || !any_in_range) {
            continue;
        }
        bearing.resize(ps.size());
        for (std::size_t p = 0; p < ps.size(); ++p) {
            bearing[p] = range[p] < zero_range
                             ? std::atan2(ps[p].state.py - s.sy, ps[p].state.px - s.sx)
                             : 0.0;
        }
        const TargetState centre = comp.density.mean();
        const double theta_c = std::atan2(centre.py - s.sy, centre.px - s.sx);
        double spread = 0.0;
        for (std::size_t p = 0; p < ps.size(); ++p) {
            spread = std::max(spread, std::abs(wrap_angle(bearing[p] - theta_c)));
        }
        const double bearing_gate = kGate * sensor.noise.bearing_std(d_hi);

        for (std::size_t j = 0; j < zs.size(); ++j) {
            if (zs[j].range < d_lo - range_gate || zs[j].range > d_hi + range_gate
                || (d_lo > 0.0 && std::abs(wrap_angle(zs[j].bearing - theta_c)) > spread + bearing_gate)) {
                continue;
            }
            double b = 0.0;
            for (std::size_t p = 0; p < ps.size(); ++p) {
                if (pd[p] <= 0.0) {
                    continue;
                }
                const double g = likelihood(zs[j], range[p], bearing[p], sensor.noise);
                if (g <= 0.0) {
                    continue;
                }
                const double m = ps[p].weight * pd[p] * g;
                b += m;
                if (collect) {
                    t.contributions[j].push_back(
                        {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(p), m});
                }
            }
            t.b[j][i] = b;
        }
    }
    return t;
}

double legacy_existence(double r, double a)
{
    return checked_probability(r * (1.0 - a) / (1.0 - r * a));
}

/// Returns r(z), or nullopt when no predicted component explains z (degenerate).
std::optional<double> measurement_existence(const MultiBernoulli& pred, const UpdateTerms& t, std::size_t j,
                                            double kappa)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred.components[i].r;
        const double b = t.b[j][i];
        if (b <= 0.0 || r <= 0.0) {
            continue;
        }
        const double miss = 1.0 - r * t.a[i];
        num += r * (1.0 - r) * b / (miss * miss);
        den += r * b / miss;
    }
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) {
        return std::nullopt;
    }
    return checked_probability(num / (kappa + den));
}

std::uint64_t measurement_key(const Measurement& z)
{
    return mix64(std::bit_cast<std::uint64_t>(z.bearing)) ^ mix64(~std::bit_cast<std::uint64_t>(z.range));
}

BernoulliComponent degenerate_component(const Measurement& z, const AgentState& s)
{
    BernoulliComponent c;
    c.r = 0.0;
    c.degenerate = true;
    c.density.particles.push_back(
        {{s.sx + z.range * std::cos(z.bearing), 0.0, s.sy + z.range * std::sin(z.bearing), 0.0}, 1.0});
    return c;
}

} // namespace

// ---- Operations ----

MultiBernoulli predict(const MultiBernoulli& prior, const MotionConfig& motion, const BirthConfig& birth,
                       const Arena& arena, RandomStream& rng)
{
    MultiBernoulli out;
    out.components.reserve(prior.size() + static_cast<std::size_t>(birth.n_birth));
    for (const auto& c : prior.components) {
        BernoulliComponent next;
        next.r = checked_probability(c.r * motion.survival());
        next.density.particles.reserve(c.density.size());
        for (const auto& p : c.density.particles) {
            next.density.particles.push_back({step_target(p.state, motion, rng), p.weight});
        }
        out.components.push_back(std::move(next));
    }
    for (int b = 0; b < birth.n_birth; ++b) {
        BernoulliComponent c;
        c.r = birth.r_birth;
        c.birth_prior = UniformBirthPrior{arena, birth.velocity_std};
        const double w = 1.0 / birth.particles_per_birth;
        c.density.particles.reserve(static_cast<std::size_t>(birth.particles_per_birth));
        for (int p = 0; p < birth.particles_per_birth; ++p) {
            const double x = rng.uniform(0.0, arena.width);
            const double y = rng.uniform(0.0, arena.height);
            const double vx = rng.normal(0.0, birth.velocity_std);
            const double vy = rng.normal(0.0, birth.velocity_std);
            c.density.particles.push_back({{x, vx, y, vy}, w});
        }
        out.components.push_back(std::move(c));
    }
    return out;
}

MultiBernoulli update(const MultiBernoulli& pred, const MeasurementSet& zs, const AgentState& s,
                      const SensorModel& sensor, const FilterConfig& cfg, RandomStream& rng)
{
    const UpdateTerms t = compute_terms(pred, zs, s, sensor, true);
    MultiBernoulli out;
    out.components.reserve(pred.size() + zs.size());

    // Legacy (missed-detection) components.
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto& c = pred.components[i];
        if (t.a[i] == 0.0) {
            out.components.push_back(c);
            continue;
        }
        BernoulliComponent l;
        l.r = legacy_existence(c.r, t.a[i]);
        l.density = c.density;
        double mass = 0.0;
        for (std::size_t p = 0; p < l.density.size(); ++p) {
            l.density.particles[p].weight *= 1.0 - t.pd[i][p];
            mass += l.density.particles[p].weight;
        }
        if (mass > 0.0) {
            l.density.normalize();
        } else {
            l.density = c.density;
            l.r = 0.0;
        }
        out.components.push_back(std::move(l));
    }

    // Measurement-updated components.
    RandomStream base = rng.fork();
    const std::size_t budget = static_cast<std::size_t>(cfg.particles_per_component);
    std::vector<double> odds(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred.components[i].r;
        odds[i] = r / std::max(1.0 - r, kOddsFloor);
    }
    for (std::size_t j = 0; j < zs.size(); ++j) {
        const Measurement& z = zs[j];
        const auto r_z = measurement_existence(pred, t, j, sensor.clutter.intensity(z));
        if (!r_z) {
            out.components.push_back(degenerate_component(z, s));
            continue;
        }
        RandomStream zrng = base.split(measurement_key(z));

        std::vector<Particle> mixture;
        mixture.reserve(t.contributions[j].size());
        for (const auto& ctb : t.contributions[j]) {
            const auto& src = pred.components[ctb.component].density.particles[ctb.particle];
            mixture.push_back({src.state, odds[ctb.component] * ctb.mass});
        }
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const auto& c = pred.components[i];
            if (!c.birth_prior || !(t.b[j][i] > 0.0) || !(c.r > 0.0)) {
                continue;
            }
            auto samples = sample_birth_given_measurement(*c.birth_prior, z, s, sensor, budget, zrng);
            double w_sum = 0.0;
            for (const auto& p : samples) {
                w_sum += p.weight;
            }
            if (!(w_sum > 0.0)) {
                continue;
            }
            const double scale = odds[i] * t.b[j][i] / w_sum;
            for (auto& p : samples) {
                mixture.push_back({p.state, p.weight * scale});
            }
        }

        double mass = 0.0;
        for (const auto& p : mixture) {
            mass += p.weight;
        }
        if (mixture.empty() || !(mass > 0.0) || !std::isfinite(mass)) {
            out.components.push_back(degenerate_component(z, s));
            continue;
        }
        BernoulliComponent m;
        m.r = *r_z;
        if (mixture.size() > budget) {
            m.density.particles = systematic_resample(mixture, budget, zrng);
        } else {
            m.density.particles = std::move(mixture);
            m.density.normalize();
        }
        out.components.push_back(std::move(m));
    }
    return out;
}

std::vector<double> updated_existence(const MultiBernoulli& pred, const MeasurementSet& zs, const AgentState& s,
                                      const SensorModel& sensor)
{
    const UpdateTerms t = compute_terms(pred, zs, s, sensor, false);
    std::vector<double> r;
    r.reserve(pred.size() + zs.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double ri = pred.components[i].r;
        r.push_back(t.a[i] == 0.0 ? ri : legacy_existence(ri, t.a[i]));
    }
    for (std::size_t j = 0; j < zs.size(); ++j) {
        r.push_back(measurement_existence(pred, t, j, sensor.clutter.intensity(zs[j])).value_or(0.0));
    }
    return r;
}

CardinalityEstimate cardinality_statistics(std::span<const double> r)
{
    CardinalityEstimate e;
    double sum = 0.0;
    double var = 0.0;
    for (double ri : r) {
        sum += ri;
        var += ri * (1.0 - ri);
    }
    e.n_hat = static_cast<int>(std::round(sum));
    e.sigma = var;
    e.sigma_tilde = r.empty() ? 1.0 : 4.0 * var / static_cast<double>(r.size());
    return e;
}

StateEstimate estimate(const MultiBernoulli& mb)
{
    const std::vector<double> r = mb.existence();
    StateEstimate out;
    out.cardinality = cardinality_statistics(r);
    std::vector<std::size_t> order(mb.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(out.cardinality.n_hat), mb.size());
    for (std::size_t k = 0; k < n; ++k) {
        out.states.push_back(mb.components[order[k]].density.mean());
    }
    return out;
}

std::vector<TargetState> predict_estimate(const MultiBernoulli& pred)
{
    std::vector<TargetState> out;
    for (const auto& c : pred.components) {
        if (c.r > 0.5) {
            out.push_back(c.density.mean());
        }
    }
    return out;
}

std::vector<Particle> systematic_resample(const std::vector<Particle>& particles, std::size_t count,
                                          RandomStream& rng)
{
    std::vector<Particle> out;
    if (particles.empty() || count == 0) {
        return out;
    }
    double total = 0.0;
    for (const auto& p : particles) {
        total += p.weight;
    }
    if (!(total > 0.0)) {
        throw std::logic_error("systematic_resample: zero total weight");
    }
    out.reserve(count);
    const double step = total / static_cast<double>(count);
    double u = rng.uniform() * step;
    double cumulative = particles[0].weight;
    std::size_t i = 0;
    const double w = 1.0 / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
        while (u > cumulative && i + 1 < particles.size()) {
            ++i;
            cumulative += particles[i].weight;
        }
        out.push_back({particles[i].state, w});
        u += step;
    }
    return out;
}

MultiBernoulli prune_and_cap(const MultiBernoulli& mb, const FilterConfig& cfg, RandomStream& rng)
{
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < mb.size(); ++i) {
        if (mb.components[i].r >= cfg.prune_threshold && !mb.components[i].degenerate) {
            keep.push_back(i);
        }
    }
    if (keep.size() > cfg.max_components) {
        std::stable_sort(keep.begin(), keep.end(),
                         [&](std::size_t a, std::size_t b) { return mb.components[a].r > mb.components[b].r; });
        keep.resize(cfg.max_components);
        std::sort(keep.begin(), keep.end());
    }
    MultiBernoulli out;
    out.components.reserve(keep.size());
    for (std::size_t i : keep) {
        BernoulliComponent c = mb.components[i];
        const double n = static_cast<double>(c.density.size());
        if (c.density.effective_sample_size() < cfg.resample_threshold * n) {
            RandomStream crng = rng.fork();
            c.density.particles = systematic_resample(c.density.particles, c.density.size(), crng);
            c.birth_prior.reset();
        }
        out.components.push_back(std::move(c));
    }
    return out;
}

std::string belief_snapshot(const MultiBernoulli& mb)
{
    using nlohmann::json;
    json comps = json::array();
    for (const auto& c : mb.components) {
        const TargetState m = c.density.mean();
        const Eigen::Matrix4d cov = c.density.covariance();
        comps.push_back({{"r", c.r},
                         {"particles", c.density.size()},
                         {"ess", c.density.effective_sample_size()},
                         {"mean", {m.px, m.vx, m.py, m.vy}},
                         {"std", {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)), std::sqrt(cov(2, 2)),
                                  std::sqrt(cov(3, 3))}},
                         {"birth", c.birth_prior.has_value()},
                         {"degenerate", c.degenerate}});
    }
    const auto card = cardinality_statistics(mb.existence());
    json doc = {{"format", "mbsat-belief-v1"},
                {"components", comps},
                {"total_existence", mb.total_existence()},
                {"cardinality", {{"n_hat", card.n_hat}, {"sigma", card.sigma}, {"sigma_tilde", card.sigma_tilde}}}};
    return doc.dump(2);
}

} // namespace mbsat
