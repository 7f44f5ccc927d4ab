#pragma once

#include <cstdint>
#include <random>

namespace lindrec
{
    __extension__ typedef __int128 i128;
    __extension__ typedef unsigned __int128 u128;

    // splitmix64 finalizer; used to derive independent seeds.
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Seed for (master, stream, replica). Pure function, so replicas are
    // reproducible regardless of scheduling.
    constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t replica) noexcept
    {
        return mix64(mix64(mix64(master) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ replica);
    }

    // Well-known stream ids. Two walks that must be independent draw from
    // different streams of the same replica.
    namespace stream
    {
        inline constexpr std::uint64_t primary = 1;
        inline constexpr std::uint64_t secondary = 2;
        inline constexpr std::uint64_t tertiary = 3;
        inline constexpr std::uint64_t drift_probe = 97;
    }

    class Rng
    {
    public:
        using result_type = std::uint64_t;

        explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

        std::uint64_t seed() const noexcept { return seed_; }

        std::uint64_t next() { return engine_(); }
        std::uint64_t operator()() { return engine_(); }
        static constexpr std::uint64_t min() { return 0; }
        static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

        // Uniform on [0,1) with 53 random bits.
        double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        // Uniform on (0,1].
        double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

        // Uniform integer in [0, n) via multiply-shift (bias < n / 2^64).
        std::uint64_t below(std::uint64_t n)
        {
            return static_cast<std::uint64_t>((static_cast<u128>(engine_()) * n) >> 64);
        }

    private:
        std::uint64_t seed_;
        std::mt19937_64 engine_;
    };
}
