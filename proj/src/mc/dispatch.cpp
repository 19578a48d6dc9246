#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "defport/mc/kernels.hpp"

namespace defport::mc {

#if DEFPORT_HAVE_AVX2_TU
const KernelSet* avx2_kernel_set_impl();
#endif

const KernelSet* avx2_kernels() {
#if DEFPORT_HAVE_AVX2_TU
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_kernel_set_impl();
#endif
  return nullptr;
}

const KernelSet& active_kernels() {
  static const KernelSet* chosen = [] {
    const KernelSet* a = avx2_kernels();
    return a ? a : scalar_kernels();
  }();
  return *chosen;
}

namespace {

constexpr std::uint64_t kChunk = 16384;

template <class Params, class Fn>
void fill_chunked(Fn fn, const Params& kp, std::uint64_t n, double* wealth, double* util,
                  int threads) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, 32));
  const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
  if (threads == 1 || chunks <= 1) {
    fn(kp, 0, n, wealth, util);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t c = static_cast<std::uint64_t>(w); c < chunks;
           c += static_cast<std::uint64_t>(threads)) {
        std::uint64_t lo = c * kChunk;
        std::uint64_t cnt = std::min(kChunk, n - lo);
        fn(kp, lo, cnt, wealth + lo, util + lo);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void fill_schedule(const ScheduleKernelParams& kp, std::uint64_t n, double* wealth, double* util,
                   int threads) {
  fill_chunked(active_kernels().schedule, kp, n, wealth, util, threads);
}

void fill_default_branch(const DefaultBranchKernelParams& kp, std::uint64_t n, double* wealth,
                         double* util, int threads) {
  fill_chunked(active_kernels().default_branch, kp, n, wealth, util, threads);
}

}  // namespace defport::mc
