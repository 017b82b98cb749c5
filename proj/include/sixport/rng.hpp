#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace sixport {

/// Counter-based generator: Philox-4x32-10 (Salmon et al., SC'11).
/// A stream is addressed by (seed, run, window); draws within a stream
/// advance a 64-bit draw counter. Distinct addresses never overlap, so
/// ensemble runs and windows can be sampled in any order or in parallel
/// while staying bit-reproducible.
class PhiloxStream {
public:
    static constexpr std::string_view algorithm = "philox4x32-10/v1";

    PhiloxStream(std::uint64_t seed, std::uint32_t run, std::uint32_t window)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          run_(run), window_(window) {}

    /// Next 32 random bits.
    std::uint32_t next_u32();

    /// Next 64 random bits.
    std::uint64_t next_u64();

    /// Uniform double in [0,1) from 53 random bits.
    double next_double();

private:
    std::array<std::uint32_t, 4> block(std::uint64_t draw_index) const;

    std::array<std::uint32_t, 2> key_;
    std::uint32_t run_;
    std::uint32_t window_;
    std::uint64_t draw_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;  // words left in buffer_
};

}  // namespace sixport
