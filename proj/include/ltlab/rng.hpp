#pragma once

#include <cmath>
#include <cstdint>

namespace ltlab {

// Counter-based splittable RNG. Every stream is derived from (seed, counter)
// through splitmix64, so parallel jobs draw from independent streams whose
// values do not depend on execution order. The normal variate uses a
// hand-rolled Box-Muller transform to keep sequences identical across
// standard-library implementations.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    /// Independent child stream; `counter` identifies the job or draw site.
    SplitRng split(std::uint64_t counter) const {
        return SplitRng(mix(state_ ^ (0x9e3779b97f4a7c15ULL * (counter + 1))));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ltlab
