#include "dnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace dnls::fft {

namespace {

// The FFTW planner is not thread-safe while plan execution on new arrays is,
// so plans are created under a lock and then shared.
class PlanRegistry {
 public:
  static PlanRegistry& instance() {
    static PlanRegistry r;
    return r;
  }

  fftw_plan get(const BoxSpec& box, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(box.d, box.M, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<int> n(box.d, box.M);
    std::vector<cplx> scratch(box.sites());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft(box.d, n.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanRegistry() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace

void forward(const BoxSpec& box, cplx* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(PlanRegistry::instance().get(box, FFTW_FORWARD), buf, buf);
}

void backward(const BoxSpec& box, cplx* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(PlanRegistry::instance().get(box, FFTW_BACKWARD), buf, buf);
}

void apply_symbol(const BoxSpec& box, cplx* data, const cplx* symbol) {
  const std::size_t n = box.sites();
  forward(box, data);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) data[i] *= symbol[i] * scale;
  backward(box, data);
}

}  // namespace dnls::fft
