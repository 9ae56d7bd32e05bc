#include "fft_backend.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "mixflow/util.hpp"

namespace mixflow::fft {
namespace {

// FFTW planning is not thread-safe; execution through the new-array interface
// is. Plans are created with FFTW_UNALIGNED so they accept any buffer.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

class PlanCache {
  public:
    PlanPair& get(const Grid& grid) {
        const auto key = std::make_pair(grid.dim(), grid.n());
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        const std::size_t size = grid.size();
        std::vector<std::complex<double>> a(size), b(size);
        auto* ap = reinterpret_cast<fftw_complex*>(a.data());
        auto* bp = reinterpret_cast<fftw_complex*>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair pair;
        if (grid.dim() == 2) {
            pair.fwd = fftw_plan_dft_2d(grid.n(), grid.n(), ap, bp, FFTW_FORWARD, flags);
            pair.bwd = fftw_plan_dft_2d(grid.n(), grid.n(), ap, bp, FFTW_BACKWARD, flags);
        } else {
            pair.fwd = fftw_plan_dft_3d(grid.n(), grid.n(), grid.n(), ap, bp, FFTW_FORWARD, flags);
            pair.bwd = fftw_plan_dft_3d(grid.n(), grid.n(), grid.n(), ap, bp, FFTW_BACKWARD, flags);
        }
        return plans_.emplace(key, pair).first->second;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void forward(const Grid& grid, const std::vector<double>& values,
             std::vector<std::complex<double>>& coefs) {
    const std::size_t size = grid.size();
    require(values.size() == size, "fft: value buffer size mismatch");
    std::vector<std::complex<double>> in(size);
    for (std::size_t i = 0; i < size; ++i) in[i] = values[i];
    coefs.assign(size, {});
    auto& plans = cache().get(grid);
    fftw_execute_dft(plans.fwd, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(coefs.data()));
    const double scale = 1.0 / static_cast<double>(size);
    for (auto& c : coefs) c *= scale;
}

void inverse(const Grid& grid, const std::vector<std::complex<double>>& coefs,
             std::vector<double>& values) {
    const std::size_t size = grid.size();
    require(coefs.size() == size, "fft: coefficient buffer size mismatch");
    // fftw_execute_dft may scribble on the input buffer; copy.
    std::vector<std::complex<double>> in(coefs);
    std::vector<std::complex<double>> out(size);
    auto& plans = cache().get(grid);
    fftw_execute_dft(plans.bwd, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    values.resize(size);
    for (std::size_t i = 0; i < size; ++i) values[i] = out[i].real();
}

}  // namespace mixflow::fft
