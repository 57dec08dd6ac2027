#pragma once

#include <array>
#include <cstdint>

namespace phasemem {

/// Philox4x32-10 block function counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Independent random streams within one realization.
enum class StreamRole : std::uint32_t { gaussian_noise = 1, cauchy_phase = 2 };

/// Counter-based stream keyed by (seed, realization, role). Streams with different keys are
/// independent and can be consumed from any thread in any order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t realization, StreamRole role) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1); never returns exactly 0, 1/2 or 1.
    double uniform_open() noexcept;

    /// Standard normal deviate (Box-Muller).
    double normal() noexcept;

    /// Cauchy deviate with location 0 and the given scale, by inverse CDF.
    double cauchy(double scale) noexcept;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t role_;
    std::uint64_t realization_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace phasemem
