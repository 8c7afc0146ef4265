#include "mbsat/random.hpp"

#include <boost/random/normal_distribution.hpp>

namespace mbsat {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RandomStream RandomStream::split(std::string_view name, std::uint64_t index) const
{
    return RandomStream(mix64(seed_ ^ mix64(fnv1a(name) + mix64(index))));
}

RandomStream RandomStream::split(std::uint64_t key) const
{
    return RandomStream(mix64(seed_ + 0x632be59bd9b4e019ULL * (key | 1ULL)) ^ key);
}

RandomStream RandomStream::fork()
{
    return RandomStream(engine_());
}

double RandomStream::uniform()
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RandomStream::uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RandomStream::normal()
{
    return boost::random::normal_distribution<double>(0.0, 1.0)(engine_);
}

double RandomStream::normal(double mean, double stddev)
{
    return mean + stddev * normal();
}

std::uint64_t RandomStream::poisson(double mean)
{
    if (mean <= 0.0) {
        return 0;
    }
    return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

} // namespace mbsat
