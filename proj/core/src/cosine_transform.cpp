#include "thinfilm/detail/cosine_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "thinfilm/error.hpp"

namespace thinfilm::detail {

namespace {

// FFTW's planner is not re-entrant; plan creation and destruction go through
// this lock, execution does not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

CosineTransform::CosineTransform(std::size_t n) : n_(n) {
  std::vector<double> a(n), b(n);
  const int ni = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
  forward_ = fftw_plan_r2r_1d(ni, a.data(), b.data(), FFTW_REDFT10, flags);
  inverse_ = fftw_plan_r2r_1d(ni, a.data(), b.data(), FFTW_REDFT01, flags);
}

CosineTransform::~CosineTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
}

const CosineTransform& CosineTransform::get(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<CosineTransform>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[n];
  if (!slot) slot.reset(new CosineTransform(n));
  return *slot;
}

void CosineTransform::synthesize(std::span<const double> coeffs, std::span<double> grid,
                                 std::span<double> scratch) const {
  if (grid.size() != n_ || scratch.size() < n_ || coeffs.size() >= n_)
    throw Error(ErrorCode::SizeMismatch, "cosine synthesis buffer sizes");
  // REDFT01: y_j = x_0 + 2 sum_{k>=1} x_k cos(pi k (j+1/2)/n)
  scratch[0] = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) scratch[k + 1] = 0.5 * coeffs[k];
  std::fill(scratch.begin() + static_cast<std::ptrdiff_t>(coeffs.size() + 1),
            scratch.begin() + static_cast<std::ptrdiff_t>(n_), 0.0);
  fftw_execute_r2r(static_cast<fftw_plan>(inverse_), scratch.data(), grid.data());
}

void CosineTransform::analyze(std::span<const double> grid, std::span<double> coeffs,
                              std::span<double> scratch) const {
  if (grid.size() != n_ || scratch.size() < n_ || coeffs.size() >= n_)
    throw Error(ErrorCode::SizeMismatch, "cosine analysis buffer sizes");
  // REDFT10: y_k = 2 sum_j x_j cos(pi k (j+1/2)/n)
  fftw_execute_r2r(static_cast<fftw_plan>(forward_), const_cast<double*>(grid.data()),
                   scratch.data());
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = scratch[k + 1] * scale;
}

}  // namespace thinfilm::detail
