// Reference kernels, one path per step.  Compiled with -ffp-contract=off so
// every rounding matches the SIMD variant.

#include "defport/mc/kernels_impl.hpp"

namespace defport::mc {

namespace {

void scalar_schedule(const ScheduleKernelParams& kp, std::uint64_t first, std::uint64_t count,
                     double* wealth, double* util) {
  schedule_kernel<ScalarBatch>(kp, first, count, wealth, util);
}

void scalar_default_branch(const DefaultBranchKernelParams& kp, std::uint64_t first,
                           std::uint64_t count, double* wealth, double* util) {
  default_branch_kernel<ScalarBatch>(kp, first, count, wealth, util);
}

const KernelSet kScalarSet{scalar_schedule, scalar_default_branch, "scalar"};

}  // namespace

const KernelSet* scalar_kernels() { return &kScalarSet; }

}  // namespace defport::mc
