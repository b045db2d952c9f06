#include "fft.hpp"

#include <mutex>
#include <vector>

#include <fftw3.h>

#include "qmlab/error.hpp"

namespace qmlab::detail {

namespace {
// The FFTW planner is not thread-safe; execution of a plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void fft_inplace(std::span<Complex> data, const TorusGrid& grid, FftDirection dir) {
  require(data.size() == grid.size(), ErrorKind::invalid_argument,
          "fft: buffer size does not match grid");
  std::vector<int> dims(static_cast<std::size_t>(grid.dimension()), grid.points_per_axis());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(grid.dimension(), dims.data(), buf, buf,
                         dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                         FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorKind::check_failed, "fft: FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace qmlab::detail
