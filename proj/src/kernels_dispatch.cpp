#include <atomic>

#include "nue/detail/kernel_backends.hpp"
#include "nue/errors.hpp"
#include "nue/kernels.hpp"

namespace nue::kern {
namespace {

struct Table {
    void (*sin2pi)(const double*, double*, std::size_t) noexcept;
    void (*log_pos)(const double*, double*, std::size_t) noexcept;
    void (*step_linear)(double*, std::size_t, double) noexcept;
    void (*step_quadratic)(double*, std::size_t, double) noexcept;
    void (*viana_step)(std::uint64_t*, std::uint64_t*, double*, double*, std::size_t,
                       double, double, int) noexcept;
    Backend backend;
};

constexpr Table kScalarTable = {scalar::sin2pi, scalar::log_pos, scalar::step_linear,
                                scalar::step_quadratic, scalar::viana_step, Backend::scalar};

#if defined(NUE_HAVE_AVX2)
constexpr Table kAvx2Table = {avx2::sin2pi, avx2::log_pos, avx2::step_linear,
                              avx2::step_quadratic, avx2::viana_step, Backend::avx2};
#endif

bool cpu_has_avx2() noexcept {
#if defined(NUE_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Table* best_table() noexcept {
#if defined(NUE_HAVE_AVX2)
    if (cpu_has_avx2()) return &kAvx2Table;
#endif
    return &kScalarTable;
}

std::atomic<const Table*> g_table{nullptr};

const Table& table() noexcept {
    const Table* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        t = best_table();
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

}  // namespace

Backend active_backend() noexcept { return table().backend; }

bool backend_available(Backend b) noexcept {
    if (b == Backend::scalar) return true;
    return cpu_has_avx2();
}

void force_backend(Backend b) {
    if (!backend_available(b)) throw ConfigError("kernel backend not available on this cpu");
    switch (b) {
        case Backend::scalar:
            g_table.store(&kScalarTable, std::memory_order_release);
            break;
        case Backend::avx2:
#if defined(NUE_HAVE_AVX2)
            g_table.store(&kAvx2Table, std::memory_order_release);
#endif
            break;
    }
}

std::string_view backend_name(Backend b) noexcept {
    return b == Backend::scalar ? "scalar" : "avx2";
}

void sin2pi(const double* in, double* out, std::size_t n) noexcept {
    table().sin2pi(in, out, n);
}
void log_pos(const double* in, double* out, std::size_t n) noexcept {
    table().log_pos(in, out, n);
}
void step_linear(double* x, std::size_t n, double mult) noexcept {
    table().step_linear(x, n, mult);
}
void step_quadratic(double* x, std::size_t n, double a0) noexcept {
    table().step_quadratic(x, n, a0);
}
void viana_step(std::uint64_t* base, std::uint64_t* rng, double* x, double* omega_out,
                std::size_t n, double a0, double coupling, int shift) noexcept {
    table().viana_step(base, rng, x, omega_out, n, a0, coupling, shift);
}

}  // namespace nue::kern
