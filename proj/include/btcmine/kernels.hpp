#pragma once
// Vector kernels behind the statistics code (correlations, least squares).
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA
// on x86-64, NEON on aarch64) are selected once at startup from CPUID, and can
// be pinned with BTCMINE_KERNELS=scalar|avx2|neon. Variants agree with the
// scalar reference up to summation-order rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace btcmine::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i (x_i - mx) * (y_i - my)
  double (*centered_dot)(const double* x, const double* y, std::size_t n, double mx, double my);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
/// Null when the backend was not compiled in or the CPU lacks it.
const KernelTable* table_for(Backend backend);
/// The table used by the library; resolved on first call.
const KernelTable& active();

std::string_view backend_name(Backend backend);

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline double centered_dot(std::span<const double> x, std::span<const double> y, double mx,
                           double my) {
  return active().centered_dot(x.data(), y.data(), x.size(), mx, my);
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

// Per-backend entry points; defined in the backend translation units.
namespace detail {
double sum_scalar(const double* x, std::size_t n);
double dot_scalar(const double* x, const double* y, std::size_t n);
double centered_dot_scalar(const double* x, const double* y, std::size_t n, double mx, double my);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);

double sum_avx2(const double* x, std::size_t n);
double dot_avx2(const double* x, const double* y, std::size_t n);
double centered_dot_avx2(const double* x, const double* y, std::size_t n, double mx, double my);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);

double sum_neon(const double* x, std::size_t n);
double dot_neon(const double* x, const double* y, std::size_t n);
double centered_dot_neon(const double* x, const double* y, std::size_t n, double mx, double my);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
}  // namespace detail

}  // namespace btcmine::kernels
