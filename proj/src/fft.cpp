#include "syncscan/fft.hpp"

#include "syncscan/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>

namespace syncscan {

namespace {

struct PlanEntry {
    fftw_plan plan = nullptr;
    double* in = nullptr;
    fftw_complex* out = nullptr;

    ~PlanEntry() {
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

// Plans are cached per size. thread_local keeps the FFTW planner (which is not
// thread-safe) out of cross-thread contention.
thread_local std::map<size_t, PlanEntry> g_plans;

PlanEntry& plan_for(size_t fft_size) {
    auto it = g_plans.find(fft_size);
    if (it != g_plans.end()) return it->second;
    PlanEntry& e = g_plans[fft_size];
    e.in = fftw_alloc_real(fft_size);
    e.out = fftw_alloc_complex(fft_size / 2 + 1);
    e.plan = fftw_plan_dft_r2c_1d(static_cast<int>(fft_size), e.in, e.out, FFTW_ESTIMATE);
    return e;
}

} // namespace

std::vector<std::complex<double>> real_fft(std::span<const double> frame, size_t fft_size) {
    if (fft_size == 0 || (fft_size & (fft_size - 1)) != 0) {
        throw InvalidArgument("fft_size must be a power of two");
    }
    if (frame.size() > fft_size) throw InvalidArgument("frame longer than fft_size");

    PlanEntry& e = plan_for(fft_size);
    std::memcpy(e.in, frame.data(), frame.size() * sizeof(double));
    std::memset(e.in + frame.size(), 0, (fft_size - frame.size()) * sizeof(double));
    fftw_execute(e.plan);

    std::vector<std::complex<double>> out(fft_size / 2 + 1);
    for (size_t k = 0; k < out.size(); ++k) out[k] = {e.out[k][0], e.out[k][1]};
    return out;
}

} // namespace syncscan
