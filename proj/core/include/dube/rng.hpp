#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace dube {

/// xoshiro256** seeded through splitmix64.
///
/// Every random quantity in the library is drawn through this generator so
/// that results are reproducible bit-for-bit given a seed. Independent streams
/// are obtained with `derive`, which hashes the parent seed together with a
/// list of integer tags; stream (seed, {t, c}) does not depend on how many
/// other streams were derived before it.
class Rng {
public:
    using result_type = std::uint64_t;

    static constexpr std::string_view algorithm = "xoshiro256**/splitmix64";

    explicit Rng(std::uint64_t seed = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

    /// Child stream keyed by `tags`; the parent state is not advanced.
    Rng derive(std::initializer_list<std::uint64_t> tags) const noexcept;

    /// Seed value of the child stream `derive(tags)` would create.
    std::uint64_t derive_seed(std::initializer_list<std::uint64_t> tags) const noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) noexcept;

    /// Standard normal draw (Marsaglia polar method, spare value cached).
    double normal() noexcept;

    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finaliser; exposed for hashing tags into seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace dube
