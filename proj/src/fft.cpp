#include "mmfuse/fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "mmfuse/errors.hpp"

namespace mmfuse::fft {

namespace {

// Plans live for the lifetime of the process. fftw_execute_dft is
// thread-safe; plan creation is not, hence the mutex.
fftw_plan plan_for(int n) {
    static std::mutex mutex;
    static std::map<int, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(n, p);
    return p;
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) {
    if (in.size() > out.size()) throw InputError("fft: input longer than transform size");
    const int n = static_cast<int>(out.size());
    thread_local std::vector<cplx> buffer;
    buffer.assign(out.size(), cplx{});
    std::copy(in.begin(), in.end(), buffer.begin());
    thread_local int cached_n = -1;
    thread_local fftw_plan cached = nullptr;
    if (n != cached_n) {
        cached = plan_for(n);
        cached_n = n;
    }
    fftw_execute_dft(cached, reinterpret_cast<fftw_complex*>(buffer.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void shift(std::span<cplx> data) {
    // Right-rotate by floor(N/2): zero frequency lands at index N/2.
    const auto pivot = data.size() - data.size() / 2;
    std::rotate(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(pivot), data.end());
}

}  // namespace mmfuse::fft
