#include "fastimpute/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "fastimpute/errors.hpp"

namespace fastimpute::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += src[idx[i]] * y[i];
  return s;
}

void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[idx[i]];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace scalar

namespace {

struct Table {
  Lane lane;
  double (*dot)(const double*, const double*, std::size_t);
  double (*dot_gather)(const double*, const std::int32_t*, const double*,
                       std::size_t);
  void (*gather)(const double*, const std::int32_t*, double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

Table make_table(Lane lane) {
  switch (lane) {
#if defined(__x86_64__) || defined(_M_X64)
    case Lane::avx2:
      return {Lane::avx2, &avx2::dot, &avx2::dot_gather, &avx2::gather,
              &avx2::axpy};
#endif
#if defined(__aarch64__)
    case Lane::neon:
      return {Lane::neon, &neon::dot, &neon::dot_gather, &neon::gather,
              &neon::axpy};
#endif
    default:
      return {Lane::scalar, &scalar::dot, &scalar::dot_gather, &scalar::gather,
              &scalar::axpy};
  }
}

Lane detect_lane() {
  if (const char* env = std::getenv("FASTIMPUTE_LANE")) {
    const std::string want(env);
    if (want == "scalar") return Lane::scalar;
    if (want == "avx2" && lane_supported(Lane::avx2)) return Lane::avx2;
    if (want == "neon" && lane_supported(Lane::neon)) return Lane::neon;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (lane_supported(Lane::avx2)) return Lane::avx2;
#endif
#if defined(__aarch64__)
  return Lane::neon;
#endif
  return Lane::scalar;
}

Table& table() {
  static Table t = make_table(detect_lane());
  return t;
}

}  // namespace

bool lane_supported(Lane lane) {
  switch (lane) {
    case Lane::scalar:
      return true;
    case Lane::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Lane::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Lane active_lane() { return table().lane; }

const char* lane_name(Lane lane) {
  switch (lane) {
    case Lane::scalar:
      return "scalar";
    case Lane::avx2:
      return "avx2";
    case Lane::neon:
      return "neon";
  }
  return "?";
}

void force_lane(Lane lane) {
  if (!lane_supported(lane))
    throw ParameterError(std::string("kernel lane not supported here: ") +
                         lane_name(lane));
  table() = make_table(lane);
}

void reset_lane() { table() = make_table(detect_lane()); }

double dot(const double* x, const double* y, std::size_t n) {
  return table().dot(x, y, n);
}

double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n) {
  return table().dot_gather(src, idx, y, n);
}

void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n) {
  table().gather(src, idx, dst, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  table().axpy(a, x, y, n);
}

}  // namespace fastimpute::kernels
