#include "fmcw/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "fmcw/error.hpp"

namespace fmcw::fft {
namespace {

// Plans are created once per (size, direction) and reused; FFTW's planner is
// not thread-safe but new-array execution is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, Direction dir) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, dir == Direction::Forward);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        // In-place plan: every execution in this file is in-place.
        auto* buf = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                          dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (plan == nullptr)
            throw Error(ErrorKind::InvalidArgument, "fft: planning failed for n=" + std::to_string(n));
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in,
                                            std::size_t n, Direction dir) {
    std::vector<std::complex<double>> buf(n);
    const std::size_t m = std::min(n, in.size());
    std::copy_n(in.begin(), m, buf.begin());
    transform_inplace(buf, dir);
    return buf;
}

void transform_inplace(std::span<std::complex<double>> data, Direction dir) {
    if (data.empty())
        return;
    fftw_plan plan = cache().get(data.size(), dir);
    fftw_execute_dft(plan, as_fftw(data.data()), as_fftw(data.data()));
}

std::vector<std::complex<double>> unitary(std::span<const std::complex<double>> in,
                                          std::size_t n, Direction dir) {
    auto out = transform(in, n, dir);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out)
        v *= scale;
    return out;
}

std::size_t good_size(std::size_t n) {
    if (n <= 1)
        return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

}  // namespace fmcw::fft
