#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace reflev {

// Counter-based splittable random stream.
//
// Each stream is a pure function of (key, counter): draw i of stream k is
// mix64(key + (i+1)*GOLDEN), the SplitMix64 output sequence. Substreams are
// derived by hashing an index or tag into the key, so a replication's stream
// depends only on its identity (seed, module tag, batch, replication) and
// never on which worker thread consumed it or in what order.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : key_(mix64(seed ^ kRootSalt)) {}

    // Child stream for a numeric index (batch or replication number).
    Stream child(std::uint64_t index) const {
        return Stream(mix64(key_ ^ mix64(index + kIndexSalt)), 0);
    }

    // Child stream for a module tag, e.g. "ladder" or "cpd".
    Stream child(std::string_view tag) const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (char c : tag) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 1099511628211ull;
        }
        return Stream(mix64(key_ ^ mix64(h + kTagSalt)), 0);
    }

    std::uint64_t next_u64() { return at(counter_++); }

    // Uniform on the open interval (0, 1); never returns 0 or 1, so logs of
    // either u or 1-u are safe and exponential draws are strictly positive.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes exactly two words per draw.
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Exponential with the given rate; strictly positive.
    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    std::uint64_t key() const { return key_; }

  private:
    Stream(std::uint64_t key, int) : key_(key) {}

    std::uint64_t at(std::uint64_t i) const {
        return mix64(key_ + (i + 1) * 0x9e3779b97f4a7c15ull);
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t kRootSalt = 0x5b4c1d0f2ea3987bull;
    static constexpr std::uint64_t kIndexSalt = 0xd3f8a1c596b072e4ull;
    static constexpr std::uint64_t kTagSalt = 0x81e6b3f7c92d5a04ull;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace reflev
