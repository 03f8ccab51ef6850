// SPDX-License-Identifier: Apache-2.0
#include "minmod/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace minmod::fft {
namespace {

// fftw_plan_* is not thread-safe, fftw_execute_dft is.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [n, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(int n)
    {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end())
            return it->second;
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (plan == nullptr)
            throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<int, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

}  // namespace

void backward_inplace(std::span<std::complex<double>> data)
{
    if (data.empty())
        return;
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(cache().get(static_cast<int>(data.size())), ptr, ptr);
}

}  // namespace minmod::fft
