#pragma once

#include <cstddef>
#include <span>

namespace thinfilm::detail {

/// Half-sample cosine transform pair on n points, backed by FFTW plans that
/// are created once per size and shared. Execution is thread-safe.
///
///   synthesize: g_j = sum_{k=1}^{m} c_k cos(pi k (j + 1/2) / n),  m < n
///   analyze:    c_k = (2/n) sum_j g_j cos(pi k (j + 1/2) / n),  k = 1..m
///
/// With m < n the coefficients beyond m are treated as zero (synthesis) or
/// dropped (analysis), which is how zero-padding and truncation are done.
class CosineTransform {
 public:
  static const CosineTransform& get(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  /// `scratch` must hold n doubles.
  void synthesize(std::span<const double> coeffs, std::span<double> grid,
                  std::span<double> scratch) const;
  /// `scratch` must hold n doubles.
  void analyze(std::span<const double> grid, std::span<double> coeffs,
               std::span<double> scratch) const;

  CosineTransform(const CosineTransform&) = delete;
  CosineTransform& operator=(const CosineTransform&) = delete;
  ~CosineTransform();

 private:
  explicit CosineTransform(std::size_t n);

  std::size_t n_;
  void* forward_;  // REDFT10
  void* inverse_;  // REDFT01
};

}  // namespace thinfilm::detail
