// AVX2+FMA variants of the kernels. Lane arithmetic mirrors
// nue/detail/kernel_core.hpp operation for operation; the equivalence tests
// in tests/test_kernels.cpp assert bit-identical outputs against the scalar
// reference. Compiled only when the toolchain supports -mavx2 -mfma.

#include "nue/detail/kernel_backends.hpp"
#include "nue/detail/kernel_core.hpp"
#include "nue/kernels.hpp"

#if defined(NUE_HAVE_AVX2)

#include <immintrin.h>

#include <cstdint>

namespace nue::kern::avx2 {
namespace {

constexpr std::uint64_t kMask52 = (1ull << 52) - 1;

inline __m256d poly_sin(__m256d t) noexcept {
    const __m256d z = _mm256_mul_pd(t, t);
    __m256d p = _mm256_set1_pd(1.58962301576546568060e-10);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.50507477628578072866e-8));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.75573136213857245213e-6));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.98412698295895385996e-4));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(8.33333333332211858878e-3));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.66666666666666307295e-1));
    return _mm256_fmadd_pd(_mm256_mul_pd(t, z), p, t);
}

inline __m256d poly_cos(__m256d t) noexcept {
    const __m256d z = _mm256_mul_pd(t, t);
    __m256d p = _mm256_set1_pd(-1.13585365213876817300e-11);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.08757008419747316778e-9));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.75573141792967388112e-7));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.48015872888517179954e-5));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.38888888888730564116e-3));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.16666666666665929218e-2));
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d base = _mm256_fmadd_pd(z, _mm256_set1_pd(-0.5), _mm256_set1_pd(1.0));
    return _mm256_fmadd_pd(w, p, base);
}

inline __m256d round_nearest(__m256d v) noexcept {
    return _mm256_round_pd(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
}

inline __m256d sin2pi_vec(__m256d x) noexcept {
    const __m256d t = _mm256_sub_pd(x, round_nearest(x));
    const __m256d q = round_nearest(_mm256_mul_pd(_mm256_set1_pd(4.0), t));
    const __m256d r = _mm256_sub_pd(t, _mm256_mul_pd(_mm256_set1_pd(0.25), q));
    const __m256d th = _mm256_mul_pd(_mm256_set1_pd(detail::kTwoPi), r);
    const __m256d sv = poly_sin(th);
    const __m256d cv = poly_cos(th);
    // odd quadrant <=> q/2 has a fractional part
    const __m256d half_q = _mm256_mul_pd(q, _mm256_set1_pd(0.5));
    const __m256d odd = _mm256_cmp_pd(
        _mm256_sub_pd(half_q, _mm256_round_pd(half_q, _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC)),
        _mm256_setzero_pd(), _CMP_NEQ_OQ);
    __m256d v = _mm256_blendv_pd(sv, cv, odd);
    const __m256d neg = _mm256_or_pd(
        _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_LT_OQ),
        _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ));
    const __m256d signbit = _mm256_set1_pd(-0.0);
    return _mm256_xor_pd(v, _mm256_and_pd(neg, signbit));
}

// int64 lanes with |v| < 2^51 to double
inline __m256d small_i64_to_pd(__m256i v) noexcept {
    const __m256i magic = _mm256_set1_epi64x(0x4338000000000000ll);  // 2^52 + 2^51
    const __m256d shifted = _mm256_castsi256_pd(_mm256_add_epi64(v, magic));
    return _mm256_sub_pd(shifted, _mm256_set1_pd(6755399441055744.0));
}

inline __m256d log_pos_vec(__m256d x) noexcept {
    const __m256d sub_mask = _mm256_cmp_pd(x, _mm256_set1_pd(detail::kDblMinNormal), _CMP_LT_OQ);
    x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1p54)), sub_mask);
    const __m256d e_adj = _mm256_and_pd(sub_mask, _mm256_set1_pd(-54.0));

    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i e_i = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1022));
    __m256d e = _mm256_add_pd(small_i64_to_pd(e_i), e_adj);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(0x000FFFFFFFFFFFFFull))),
        _mm256_set1_epi64x(0x3FE0000000000000ll)));
    const __m256d m_mask = _mm256_cmp_pd(m, _mm256_set1_pd(detail::kSqrtHalf), _CMP_LT_OQ);
    m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), m_mask);
    e = _mm256_sub_pd(e, _mm256_and_pd(m_mask, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d z = _mm256_mul_pd(s, s);
    __m256d p = _mm256_set1_pd(4.34782608695652173913e-2);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.76190476190476190476e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(5.26315789473684210526e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(5.88235294117647058824e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(6.66666666666666666667e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(7.69230769230769230769e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(9.09090909090909090909e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.11111111111111111111e-1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.42857142857142857143e-1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0e-1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(3.33333333333333333333e-1));
    const __m256d s2 = _mm256_add_pd(s, s);
    const __m256d lm = _mm256_fmadd_pd(_mm256_mul_pd(s2, z), p, s2);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(detail::kLn2Hi),
                           _mm256_fmadd_pd(e, _mm256_set1_pd(detail::kLn2Lo), lm));
}

inline __m256i xorshift64_vec(__m256i x) noexcept {
    x = _mm256_xor_si256(x, _mm256_slli_epi64(x, 13));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 7));
    x = _mm256_xor_si256(x, _mm256_slli_epi64(x, 17));
    return x;
}

}  // namespace

void sin2pi(const double* in, double* out, std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, sin2pi_vec(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i) out[i] = detail::sin2pi_core(in[i]);
}

void log_pos(const double* in, double* out, std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, log_pos_vec(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i) out[i] = detail::log_pos_core(in[i]);
}

void step_linear(double* x, std::size_t n, double mult) noexcept {
    const __m256d m = _mm256_set1_pd(mult);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d y = _mm256_mul_pd(m, _mm256_loadu_pd(x + i));
        const __m256d f = _mm256_round_pd(y, _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
        _mm256_storeu_pd(x + i, _mm256_sub_pd(y, f));
    }
    for (; i < n; ++i) x[i] = detail::step_linear_core(x[i], mult);
}

void step_quadratic(double* x, std::size_t n, double a0) noexcept {
    const __m256d a = _mm256_set1_pd(a0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(x + i, _mm256_fnmadd_pd(v, v, a));
    }
    for (; i < n; ++i) x[i] = detail::step_quadratic_core(x[i], a0);
}

void viana_step(std::uint64_t* base, std::uint64_t* rng, double* x, double* omega_out,
                std::size_t n, double a0, double coupling, int shift) noexcept {
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
    const __m256i mask52 = _mm256_set1_epi64x(static_cast<long long>(kMask52));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d a = _mm256_set1_pd(a0);
    const __m256d eps = _mm256_set1_pd(coupling);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(base + i));
        const __m256d omega =
            _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(b, one_bits)), one);
        if (omega_out) _mm256_storeu_pd(omega_out + i, omega);
        const __m256d s = sin2pi_vec(omega);
        const __m256d drive = _mm256_fmadd_pd(eps, s, a);
        const __m256d xv = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(x + i, _mm256_fnmadd_pd(xv, xv, drive));
        const __m256i r = xorshift64_vec(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rng + i)));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(rng + i), r);
        const __m256i digits = _mm256_srli_epi64(r, 64 - shift);
        const __m256i shifted = _mm256_and_si256(_mm256_slli_epi64(b, shift), mask52);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(base + i),
                            _mm256_or_si256(shifted, digits));
    }
    if (i < n)
        scalar::viana_step(base + i, rng + i, x + i, omega_out ? omega_out + i : nullptr,
                           n - i, a0, coupling, shift);
}

}  // namespace nue::kern::avx2

#endif  // NUE_HAVE_AVX2
