#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace msvar {

/// Reproducible random source.
///
/// Engine: MT19937-64 (Matsumoto & Nishimura), whose output sequence is fixed
/// by the C++ standard, seeded with a single 64-bit value.
/// Uniforms: u = ((x >> 11) + 0.5) * 2^-53, so u lies strictly inside (0, 1).
/// Gaussians: basic Box-Muller, both variates of a pair are used in order
/// (z0 = r cos(2 pi u2), then z1 = r sin(2 pi u2), r = sqrt(-2 ln u1)).
/// std::normal_distribution is avoided because its algorithm is
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        const std::uint64_t x = engine_();
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    /// Inverse-CDF draw from a discrete distribution (probabilities need not
    /// be normalized exactly; the last category absorbs round-off).
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            acc += probs[k];
            if (u < acc) return k;
        }
        return probs.size() - 1;
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Per-replication seed derivation shared by every Monte Carlo harness.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return master ^ index;
}

}  // namespace msvar
