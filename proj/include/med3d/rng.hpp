#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace med3d {

// Deterministic random source. Distributions are implemented here rather than
// with std:: distribution objects, whose output is implementation-defined;
// every draw below is a pure function of the mt19937_64 stream, so datasets
// and training traces reproduce bit-exactly across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Rejection sampling to avoid modulo bias.
    int uniform_int(int n) {
        if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive, got " + std::to_string(n));
        const uint64_t un = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    // Standard normal via Box-Muller (no cached spare, keeps the state
    // exactly the engine state).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stdev) { return mean + stdev * normal(); }

    // Derives an independent child stream; splitmix64 over (seed-ish state ^ tag).
    Rng fork(uint64_t tag) {
        uint64_t z = next_u64() ^ (0x9E3779B97F4A7C15ull * (tag + 1));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return Rng(z ^ (z >> 31));
    }

    std::string state_string() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }

    void set_state_string(const std::string& s) {
        std::istringstream is(s);
        is >> eng_;
        if (is.fail()) throw std::runtime_error("Rng: malformed state string");
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace med3d
