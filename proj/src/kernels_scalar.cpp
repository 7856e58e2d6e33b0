#include <cmath>
#include <cstdint>

#include "nue/detail/kernel_core.hpp"
#include "nue/kernels.hpp"
#include "nue/rng.hpp"

namespace nue::kern {

double sin2pi(double x) noexcept { return detail::sin2pi_core(x); }
double log_pos(double x) noexcept { return detail::log_pos_core(x); }

namespace scalar {

void sin2pi(const double* in, double* out, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::sin2pi_core(in[i]);
}

void log_pos(const double* in, double* out, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::log_pos_core(in[i]);
}

void step_linear(double* x, std::size_t n, double mult) noexcept {
    for (std::size_t i = 0; i < n; ++i) x[i] = detail::step_linear_core(x[i], mult);
}

void step_quadratic(double* x, std::size_t n, double a0) noexcept {
    for (std::size_t i = 0; i < n; ++i) x[i] = detail::step_quadratic_core(x[i], a0);
}

void viana_step(std::uint64_t* base, std::uint64_t* rng, double* x, double* omega_out,
                std::size_t n, double a0, double coupling, int shift) noexcept {
    constexpr std::uint64_t kMask52 = (1ull << 52) - 1;
    constexpr std::uint64_t kOneBits = 0x3FF0000000000000ull;
    for (std::size_t i = 0; i < n; ++i) {
        const double omega = std::bit_cast<double>(base[i] | kOneBits) - 1.0;
        if (omega_out) omega_out[i] = omega;
        x[i] = detail::viana_fiber_core(omega, x[i], a0, coupling);
        const std::uint64_t r = xorshift64(rng[i]);
        rng[i] = r;
        base[i] = ((base[i] << shift) & kMask52) | (r >> (64 - shift));
    }
}

}  // namespace scalar
}  // namespace nue::kern
