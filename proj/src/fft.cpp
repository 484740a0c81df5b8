#include "dmnls/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace dmnls::fft {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created in-place and unaligned so any buffer works.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dimension, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dimension, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = dimension == 1 ? n : static_cast<std::size_t>(n) * n;
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dimension == 1 ? fftw_plan_dft_1d(n, scratch, scratch, sign, flags)
                                    : fftw_plan_dft_2d(n, n, scratch, scratch, sign, flags);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& grid, std::span<const cplx> in, std::span<cplx> out, int sign) {
  if (in.size() != grid.size() || out.size() != grid.size())
    throw std::invalid_argument("fft: buffer size does not match grid");
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  fftw_plan plan = PlanCache::instance().get(grid.dimension(), grid.points_per_axis(), sign);
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, data, data);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.size()));
  for (auto& z : out) z *= scale;
}

}  // namespace

void forward(const Grid& grid, std::span<const cplx> in, std::span<cplx> out) {
  execute(grid, in, out, FFTW_FORWARD);
}

void inverse(const Grid& grid, std::span<const cplx> in, std::span<cplx> out) {
  execute(grid, in, out, FFTW_BACKWARD);
}

}  // namespace dmnls::fft
