#pragma once

#include <cmath>
#include <cstdint>

namespace mptcs {

// splitmix64 finalizer; full-period bijective mixer
constexpr uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Derive an independent child key from (key, tag). Used to split one seed
// into named streams without sharing state.
constexpr uint64_t derive_key(uint64_t key, uint64_t tag) {
    return mix64(key + kGolden * (tag + 1));
}

// Counter-based generator: the value stream is a pure function of
// (key, stream, draw index), so any consumer can be replayed without
// storing generator state.
class KeyedRng {
public:
    explicit KeyedRng(uint64_t key, uint64_t stream = 0)
        : base_(derive_key(key, stream)) {}

    uint64_t next_u64() { return mix64(base_ + kGolden * ++counter_); }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [lo, hi], inclusive
    int32_t next_int(int32_t lo, int32_t hi) {
        uint64_t span = static_cast<uint64_t>(static_cast<int64_t>(hi) - lo) + 1;
        return static_cast<int32_t>(lo + static_cast<int64_t>(next_u64() % span));
    }

    bool next_bool(double p) { return next_unit() < p; }

    // standard normal via Box-Muller; consumes two draws
    double next_normal() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    uint64_t fork(uint64_t tag) { return derive_key(base_, tag); }

private:
    uint64_t base_;
    uint64_t counter_ = 0;
};

// Named stream salts so distinct consumers of one test-case key never overlap.
namespace streams {
constexpr uint64_t kInitialState = 0x11;
constexpr uint64_t kTransition = 0x22;   // offset by step index per step
constexpr uint64_t kMutation = 0x33;
constexpr uint64_t kProvision = 0x44;
constexpr uint64_t kRanking = 0x55;
constexpr uint64_t kGa = 0x66;
constexpr uint64_t kFuzzer = 0x77;
constexpr uint64_t kCalibration = 0x88;
}  // namespace streams

}  // namespace mptcs
