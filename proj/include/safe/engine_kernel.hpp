#pragma once

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

// Definition of safe::run_replicates; include via safe/engine.hpp.

namespace safe {

template <class Program>
KernelStats run_replicates(const Program& prog, const RngStream& stream,
                           std::uint64_t count, int threads,
                           std::vector<double>* retained) {
    const std::uint64_t nchunks =
        (count + detail::kKernelChunk - 1) / detail::kKernelChunk;
    std::vector<KernelStats> parts(nchunks);
    if (retained != nullptr) retained->assign(count, 0.0);
    double* slots = retained != nullptr ? retained->data() : nullptr;

#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
#else
    (void)threads;
#endif
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        const std::uint64_t begin =
            static_cast<std::uint64_t>(c) * detail::kKernelChunk;
        const std::uint64_t end = std::min(count, begin + detail::kKernelChunk);
        detail::run_chunk(prog, stream, begin, end, parts[c], slots);
    }
    return detail::merge_chunks(parts);
}

}  // namespace safe
