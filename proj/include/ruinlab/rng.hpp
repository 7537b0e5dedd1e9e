#ifndef RUINLAB_RNG_HPP
#define RUINLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ruinlab {

// Counter-based generator: the i-th draw of stream (seed, stream_id) is a pure
// function of (seed, stream_id, i). Chunked or threaded runs that hand the
// same stream to the same path therefore reproduce identical draws, whatever
// the chunk count or thread schedule. The output function is the SplitMix64
// finalizer over a golden-ratio counter walk.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : base_(derive_base(seed, stream)) {}

    std::uint64_t next_u64() noexcept {
        counter_ += kGamma;
        return mix(base_ + counter_);
    }

    // uniform on [0,1) with 53 significant bits; never returns 1.0
    double next_u01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // exponential with the given rate; strictly positive
    double next_exp(double rate) noexcept {
        return -std::log1p(-next_u01()) / rate;
    }

    std::uint64_t position() const noexcept { return counter_ / kGamma; }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t derive_base(std::uint64_t seed, std::uint64_t stream) noexcept {
        return mix(seed + kGamma) ^ mix(stream + 0xD1B54A32D192ED03ull);
    }

    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

inline RngStream rng_substream(std::uint64_t seed, std::uint64_t chunk) noexcept {
    return RngStream(seed, chunk);
}

}  // namespace ruinlab

#endif
