#pragma once

// Batch math kernels for the Monte Carlo engines. Every kernel has a scalar
// reference implementation and, on x86-64 with AVX2+FMA, a vector variant
// selected at runtime. The two are bit-identical by construction (same IEEE
// operations in the same order), so backend choice never changes results.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace nue::kern {

enum class Backend { scalar, avx2 };

Backend active_backend() noexcept;
bool backend_available(Backend b) noexcept;
// Throws nue::ConfigError if the backend is not available on this machine.
void force_backend(Backend b);
std::string_view backend_name(Backend b) noexcept;

// Scalar cores (always available; these define the semantics).
double sin2pi(double x) noexcept;
double log_pos(double x) noexcept;

// Batch kernels; in/out may alias only where noted.
void sin2pi(const double* in, double* out, std::size_t n) noexcept;
void log_pos(const double* in, double* out, std::size_t n) noexcept;
// x <- frac(mult * x), elementwise in place.
void step_linear(double* x, std::size_t n, double mult) noexcept;
// x <- a0 - x^2, elementwise in place.
void step_quadratic(double* x, std::size_t n, double a0) noexcept;

// One step of the skew product on a block of lanes.
//   base    52-bit fixed-point base coordinates (omega = base * 2^-52)
//   rng     xorshift64 lane states feeding fresh low digits (nonzero)
//   x       fiber coordinates
//   omega_out  optional: omega values *before* the step (for observables)
// The base advances by `shift` bits per step (4 for the x16 map, 1 for x2);
// digits drained at the top are replaced by rng bits at the bottom, which is
// exact x(2^shift) mod 1 dynamics for a Lebesgue-typical point.
void viana_step(std::uint64_t* base, std::uint64_t* rng, double* x,
                double* omega_out, std::size_t n, double a0, double coupling,
                int shift) noexcept;

}  // namespace nue::kern
