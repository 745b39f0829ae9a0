#pragma once

#include <cstddef>
#include <cstdint>

// Inner-loop arithmetic kernels. Every hot loop in the library runs over
// the observed entries of one matrix row (gathered feature columns, dot
// products, residual updates), so these four primitives carry essentially
// all of the flops. A scalar reference implementation always exists;
// AVX2 (x86-64) and NEON (aarch64) variants are selected once at startup
// and can be overridden for equivalence testing.
namespace fastimpute::kernels {

enum class Lane { scalar, avx2, neon };

Lane active_lane();
const char* lane_name(Lane lane);
bool lane_supported(Lane lane);

// Overrides runtime detection; throws ParameterError when the lane is not
// available on this machine. The FASTIMPUTE_LANE environment variable
// ("scalar", "avx2", "neon") is honored at first use.
void force_lane(Lane lane);
void reset_lane();

double dot(const double* x, const double* y, std::size_t n);

// sum_j src[idx[j]] * y[j]
double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n);

// dst[j] = src[idx[j]]
void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

// Reference kernels, exposed so variant outputs can be checked against
// them directly.
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n);
void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n);
void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n);
void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace neon
#endif

}  // namespace fastimpute::kernels
