#pragma once
#include <cstdint>
#include <cmath>

namespace specgame {

// Identifies one deterministic sample stream. Equal (master_seed, stream_index)
// pairs always reproduce the same stream; distinct stream indices give
// statistically independent streams, which is what lets sweep workers run
// concurrently without sharing generator state.
struct RngSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// Counter-free splitmix64 stream. The start state mixes master seed and stream
// index through the splitmix finalizer twice, so neighboring stream indices
// land at unrelated points of the underlying sequence.
class RngStream {
public:
    explicit RngStream(RngSeed s) : RngStream(s.master_seed, s.stream_index) {}
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        state_ = mix(master_seed) ^ mix(stream_index * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Rayleigh with scale sigma (mode parameter, E[x^2] = 2 sigma^2).
    double rayleigh(double sigma) {
        double u = 1.0 - uniform01();
        return sigma * std::sqrt(-2.0 * std::log(u));
    }

    // Uniform integer in [0, n); n must be positive. Rejection-free modulo is
    // fine here: n is tiny compared to 2^64 so the bias is far below anything
    // the simulations can resolve.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace specgame
