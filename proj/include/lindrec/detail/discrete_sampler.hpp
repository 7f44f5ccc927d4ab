#pragma once

#include "lindrec/random.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace lindrec::detail
{
    // Index sampler over a fixed probability vector. Up to kLinearLimit
    // entries use a linear scan over 64-bit cumulative thresholds (one random
    // word per draw); larger tables use Walker/Vose aliasing.
    class DiscreteSampler
    {
    public:
        static constexpr std::size_t kLinearLimit = 8;

        DiscreteSampler() = default;

        explicit DiscreteSampler(std::span<const double> probs)
        {
            if (probs.empty())
            {
                throw std::invalid_argument("DiscreteSampler: empty probability vector");
            }
            size_ = probs.size();
            double total = 0.0;
            for (double p : probs)
            {
                if (!(p >= 0.0))
                {
                    throw std::invalid_argument("DiscreteSampler: negative probability");
                }
                total += p;
            }
            if (!(total > 0.0))
            {
                throw std::invalid_argument("DiscreteSampler: zero total mass");
            }
            if (size_ <= kLinearLimit)
            {
                build_linear(probs, total);
            }
            else
            {
                build_alias(probs, total);
            }
        }

        std::size_t size() const noexcept { return size_; }

        std::size_t draw(Rng& rng) const
        {
            if (!cumulative_.empty())
            {
                const std::uint64_t u = rng.next();
                for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i)
                {
                    if (u < cumulative_[i])
                    {
                        return i;
                    }
                }
                return cumulative_.size() - 1;
            }
            const std::size_t column = static_cast<std::size_t>(rng.below(size_));
            return rng.next() < threshold_[column] ? column : alias_[column];
        }

    private:
        static std::uint64_t to_threshold(double fraction)
        {
            if (fraction <= 0.0)
            {
                return 0;
            }
            if (fraction >= 1.0)
            {
                return std::numeric_limits<std::uint64_t>::max();
            }
            return static_cast<std::uint64_t>(std::ldexp(fraction, 64));
        }

        void build_linear(std::span<const double> probs, double total)
        {
            cumulative_.resize(probs.size());
            long double acc = 0.0L;
            for (std::size_t i = 0; i < probs.size(); ++i)
            {
                acc += static_cast<long double>(probs[i]) / total;
                cumulative_[i] = to_threshold(static_cast<double>(acc));
            }
        }

        void build_alias(std::span<const double> probs, double total)
        {
            const std::size_t n = probs.size();
            std::vector<double> scaled(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                scaled[i] = probs[i] / total * static_cast<double>(n);
            }
            threshold_.assign(n, std::numeric_limits<std::uint64_t>::max());
            alias_.resize(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                alias_[i] = static_cast<std::uint32_t>(i);
            }
            std::vector<std::size_t> small;
            std::vector<std::size_t> large;
            for (std::size_t i = 0; i < n; ++i)
            {
                (scaled[i] < 1.0 ? small : large).push_back(i);
            }
            while (!small.empty() && !large.empty())
            {
                const std::size_t s = small.back();
                small.pop_back();
                const std::size_t l = large.back();
                threshold_[s] = to_threshold(scaled[s]);
                alias_[s] = static_cast<std::uint32_t>(l);
                scaled[l] = (scaled[l] + scaled[s]) - 1.0;
                if (scaled[l] < 1.0)
                {
                    large.pop_back();
                    small.push_back(l);
                }
            }
            // Leftovers are 1 up to rounding.
            for (std::size_t i : small)
            {
                threshold_[i] = std::numeric_limits<std::uint64_t>::max();
            }
            for (std::size_t i : large)
            {
                threshold_[i] = std::numeric_limits<std::uint64_t>::max();
            }
        }

        std::size_t size_ = 0;
        std::vector<std::uint64_t> cumulative_;
        std::vector<std::uint64_t> threshold_;
        std::vector<std::uint32_t> alias_;
    };
}
