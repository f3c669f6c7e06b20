#include "sart/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace sart::fft {

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>;

struct PlanCache {
    std::mutex mu;
    std::map<Key, fftw_plan> plans;
    ~PlanCache() {
        for (auto& [k, p] : plans) fftw_destroy_plan(p);
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

fftw_plan get_plan(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist, int sign) {
    auto& c = cache();
    std::lock_guard lock(c.mu);
    Key key{n, howmany, stride, dist, sign};
    auto it = c.plans.find(key);
    if (it != c.plans.end()) return it->second;
    // Plan on scratch memory; execution goes through the new-array interface.
    std::size_t extent = (howmany - 1) * dist + (n - 1) * stride + 1;
    std::vector<cplx> scratch(extent);
    int nn = static_cast<int>(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_many_dft(1, &nn, static_cast<int>(howmany), buf, nullptr, static_cast<int>(stride),
                                     static_cast<int>(dist), buf, nullptr, static_cast<int>(stride),
                                     static_cast<int>(dist), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    c.plans.emplace(key, p);
    return p;
}

}  // namespace

void transform(cplx* data, std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist, int sign) {
    if (n == 0 || howmany == 0) return;
    fftw_plan p = get_plan(n, howmany, stride, dist, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, buf, buf);
}

}  // namespace sart::fft
