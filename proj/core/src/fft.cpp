#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace mcnls::detail {
namespace {

// The FFTW planner is not thread-safe; plan execution on fresh arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rank, int n, FftDirection direction) {
    const auto key = std::make_tuple(rank, n, direction);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t total =
        rank == 1 ? static_cast<std::size_t>(n)
                  : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<std::complex<double>> a(total), b(total);
    const int sign = direction == FftDirection::kForward ? FFTW_FORWARD
                                                         : FFTW_BACKWARD;
    const int dims[2] = {n, n};
    fftw_plan plan = fftw_plan_dft(
        rank, dims, reinterpret_cast<fftw_complex*>(a.data()),
        reinterpret_cast<fftw_complex*>(b.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, FftDirection>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dft(std::span<const std::complex<double>> in,
         std::span<std::complex<double>> out, int rank, int n,
         FftDirection direction) {
  const std::size_t total =
      rank == 1 ? static_cast<std::size_t>(n)
                : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (in.size() != total || out.size() != total) {
    throw std::invalid_argument("dft: buffer size does not match transform");
  }
  fftw_plan plan = cache().get(rank, n, direction);
  // Plans are out-of-place; route aliasing calls through a scratch copy.
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> scratch(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return;
  }
  fftw_execute_dft(
      plan,
      const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data())),
      reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace mcnls::detail

namespace mcnls {

const char* fft_backend_version() { return fftw_version; }

}  // namespace mcnls
