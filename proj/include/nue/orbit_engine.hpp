#pragma once

// Single-orbit iterator used by traces, correlation measurement and density
// estimation. Integer-slope circle maps (and the viana base) iterate on
// fixed-point digit streams: plain double iteration of m*x mod 1 hits an
// exact dyadic/triadic rational after ~52/log2(m) steps and collapses to 0,
// which would corrupt every statistic read off the orbit. A stream extends
// the initial point's digit expansion with pseudorandom digits, i.e. it
// iterates a Lebesgue-typical point with the prescribed leading digits.

#include <bit>
#include <cstdint>

#include "nue/detail/kernel_core.hpp"
#include "nue/kernels.hpp"
#include "nue/map.hpp"
#include "nue/rng.hpp"

namespace nue {

class OrbitEngine {
  public:
    OrbitEngine(const MapSystem& map, const Point& x0, std::uint64_t digit_seed)
        : map_(&map) {
        if (!in_domain(map, x0)) throw DomainError("orbit: initial point outside domain");
        rng_ = lane_seed(digit_seed, 0);
        switch (map.kind) {
            case MapKind::doubling:
                mode_ = Mode::pow2_stream;
                shift_ = 1;
                fixed_ = static_cast<std::uint64_t>(x0.first * 0x1p52) & kMask52;
                break;
            case MapKind::ternary:
                mode_ = Mode::base3_stream;
                fixed_ = static_cast<std::uint64_t>(x0.first * static_cast<double>(kPow3));
                if (fixed_ >= kPow3) fixed_ = kPow3 - 1;
                break;
            case MapKind::viana:
                mode_ = Mode::viana_stream;
                shift_ = map.base_mult == 16 ? 4 : 1;
                fixed_ = static_cast<std::uint64_t>(x0.first * 0x1p52) & kMask52;
                x_ = x0.second;
                break;
            case MapKind::quadratic:
            case MapKind::cubic:
                mode_ = Mode::plain;
                x_ = x0.first;
                break;
            case MapKind::synthetic:
                throw DomainError("synthetic map has no pointwise dynamics");
        }
    }

    double base_value() const noexcept {
        if (mode_ == Mode::base3_stream)
            return static_cast<double>(fixed_) / static_cast<double>(kPow3);
        return std::bit_cast<double>(fixed_ | 0x3FF0000000000000ull) - 1.0;
    }

    Point point() const noexcept {
        switch (mode_) {
            case Mode::pow2_stream:
            case Mode::base3_stream:
                return Point::one_d(base_value());
            case Mode::viana_stream:
                return Point::skew(base_value(), x_);
            case Mode::plain:
            default:
                return Point::one_d(x_);
        }
    }

    // The coordinate an observable reads: the fiber for skew products.
    double coordinate() const noexcept {
        return mode_ == Mode::viana_stream ? x_ : point().first;
    }

    void advance() {
        switch (mode_) {
            case Mode::pow2_stream: {
                rng_ = xorshift64(rng_);
                fixed_ = ((fixed_ << shift_) & kMask52) | (rng_ >> (64 - shift_));
                break;
            }
            case Mode::base3_stream: {
                rng_ = xorshift64(rng_);
                const std::uint64_t d = ((rng_ >> 32) * 3ull) >> 32;
                // (3M mod 3^32) is divisible by 3, so adding d < 3 stays in range
                fixed_ = (fixed_ * 3ull) % kPow3 + d;
                break;
            }
            case Mode::viana_stream:
                kern::viana_step(&fixed_, &rng_, &x_, nullptr, 1, map_->a0, map_->coupling,
                                 shift_);
                break;
            case Mode::plain:
                x_ = map_->kind == MapKind::quadratic
                         ? kern::detail::step_quadratic_core(x_, map_->a0)
                         : x_ * x_ * x_;
                break;
        }
    }

  private:
    enum class Mode { plain, pow2_stream, base3_stream, viana_stream };
    static constexpr std::uint64_t kMask52 = (1ull << 52) - 1;
    static constexpr std::uint64_t kPow3 = 1853020188851841ull;  // 3^32 < 2^52

    const MapSystem* map_;
    Mode mode_ = Mode::plain;
    int shift_ = 1;
    std::uint64_t fixed_ = 0;
    std::uint64_t rng_ = 1;
    double x_ = 0.0;
};

}  // namespace nue
