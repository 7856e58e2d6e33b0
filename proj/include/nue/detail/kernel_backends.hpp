#pragma once

// Internal: per-backend entry points behind the dispatch layer.

#include <cstddef>
#include <cstdint>

namespace nue::kern {

namespace scalar {
void sin2pi(const double* in, double* out, std::size_t n) noexcept;
void log_pos(const double* in, double* out, std::size_t n) noexcept;
void step_linear(double* x, std::size_t n, double mult) noexcept;
void step_quadratic(double* x, std::size_t n, double a0) noexcept;
void viana_step(std::uint64_t* base, std::uint64_t* rng, double* x, double* omega_out,
                std::size_t n, double a0, double coupling, int shift) noexcept;
}  // namespace scalar

#if defined(NUE_HAVE_AVX2)
namespace avx2 {
void sin2pi(const double* in, double* out, std::size_t n) noexcept;
void log_pos(const double* in, double* out, std::size_t n) noexcept;
void step_linear(double* x, std::size_t n, double mult) noexcept;
void step_quadratic(double* x, std::size_t n, double a0) noexcept;
void viana_step(std::uint64_t* base, std::uint64_t* rng, double* x, double* omega_out,
                std::size_t n, double a0, double coupling, int shift) noexcept;
}  // namespace avx2
#endif

}  // namespace nue::kern
