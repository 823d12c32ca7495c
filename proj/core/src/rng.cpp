#include "dube/rng.hpp"

#include <bit>
#include <cmath>

namespace dube {

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) noexcept
{
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) noexcept : seed_(seed)
{
    std::uint64_t sm = seed;
    for (auto& word : s_) {
        word = splitmix_next(sm);
    }
}

Rng::result_type Rng::operator()() noexcept
{
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

std::uint64_t Rng::derive_seed(std::initializer_list<std::uint64_t> tags) const noexcept
{
    std::uint64_t h = mix64(seed_ ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t tag : tags) {
        h = mix64(h + 0x9e3779b97f4a7c15ULL + mix64(tag + 0x3c6ef372fe94f82bULL));
    }
    return h;
}

Rng Rng::derive(std::initializer_list<std::uint64_t> tags) const noexcept
{
    return Rng(derive_seed(tags));
}

double Rng::uniform() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) noexcept
{
    // Lemire's multiply-shift with rejection.
    const std::uint64_t range = n;
    std::uint64_t x = (*this)();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
        const std::uint64_t threshold = (0 - range) % range;
        while (low < threshold) {
            x = (*this)();
            m = static_cast<unsigned __int128>(x) * range;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::size_t>(m >> 64);
}

double Rng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

}  // namespace dube
