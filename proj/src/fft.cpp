#include "hesc/fft.hpp"

#include "hesc/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace hesc::fft {
namespace {

// FFTW's planner is not reentrant; execution with the new-array interface is.
// ESTIMATE plans are deterministic, so results do not depend on which thread
// or which run created the plan.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rank, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rank, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t count = rank == 2 ? std::size_t(n) * n : std::size_t(n);
    std::vector<cplx> a(count), b(count);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = rank == 2 ? fftw_plan_dft_2d(n, n, in, out, sign, flags)
                               : fftw_plan_dft_1d(n, in, out, sign, flags);
    if (plan == nullptr) throw InvalidArgument("FFTW could not plan a transform of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(int rank, int n, int sign, std::span<const cplx> in, std::span<cplx> out) {
  const std::size_t count = rank == 2 ? std::size_t(n) * n : std::size_t(n);
  if (in.size() != count || out.size() != count) throw InvalidArgument("FFT buffer size mismatch");
  fftw_plan plan = cache().get(rank, n, sign);
  // FFTW never writes through the input pointer of an out-of-place c2c plan.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(int n, std::span<const cplx> in, std::span<cplx> out) { run(2, n, FFTW_FORWARD, in, out); }
void backward(int n, std::span<const cplx> in, std::span<cplx> out) { run(2, n, FFTW_BACKWARD, in, out); }
void forward_1d(int n, std::span<const cplx> in, std::span<cplx> out) { run(1, n, FFTW_FORWARD, in, out); }
void backward_1d(int n, std::span<const cplx> in, std::span<cplx> out) { run(1, n, FFTW_BACKWARD, in, out); }

}  // namespace hesc::fft
