#include "pdlink/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace pdlink {
namespace {

// Plans are cached per (size, direction). Plan creation is not thread-safe in
// FFTW, execution on caller-owned arrays is, hence the mutex around the cache.
// FFTW_UNALIGNED lets the plan run on ordinary std::vector storage.
class PlanCache {
  public:
    void execute(std::vector<cplx>& x, int sign) {
        if (x.empty()) return;
        fftw_plan plan = get(x.size(), sign);
        auto* p = reinterpret_cast<fftw_complex*>(x.data());
        fftw_execute_dft(plan, p, p);
    }

  private:
    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> scratch(n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(int(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void fft_forward(std::vector<cplx>& x) { cache().execute(x, FFTW_FORWARD); }

void fft_inverse(std::vector<cplx>& x) {
    cache().execute(x, FFTW_BACKWARD);
    const double scale = 1.0 / double(x.size());
    for (auto& v : x) v *= scale;
}

}  // namespace pdlink
