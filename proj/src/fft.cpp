#include "fft.hpp"

#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace pwcert::detail {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe, execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [shape, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.backward);
    }
  }

  PlanPair get(const GridShape& shape) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(shape);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(grid_points(shape));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_3d(shape[0], shape[1], shape[2], buf, buf, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_3d(shape[0], shape[1], shape[2], buf, buf, FFTW_BACKWARD, flags);
    plans_.emplace(shape, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<GridShape, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(const GridShape& shape, std::complex<double>* data, int sign) {
  const auto plans = cache().get(shape);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(sign < 0 ? plans.forward : plans.backward, buf, buf);
}

}  // namespace pwcert::detail
