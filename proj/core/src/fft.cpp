#include "tlsfluc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "tlsfluc/errors.hpp"

namespace tlsfluc {

namespace {

// Plans are created with FFTW_UNALIGNED so they can execute on plain vector
// storage via the new-array interface. Creation is not thread-safe in FFTW;
// execution on distinct arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : c2c_) fftw_destroy_plan(plan);
    for (auto& [key, plan] : r2c_) fftw_destroy_plan(plan);
    fftw_cleanup();
  }

  fftw_plan complex_plan(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = c2c_.find(key);
    if (it != c2c_.end()) return it->second;
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n) * 2);
    fftw_plan p = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(buf.data()),
        reinterpret_cast<fftw_complex*>(buf.data() + n), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    c2c_.emplace(key, p);
    return p;
  }

  fftw_plan real_plan(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = r2c_.find(n);
    if (it != r2c_.end()) return it->second;
    std::vector<double> in(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n) / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(
        n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    r2c_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> c2c_;
  std::map<int, fftw_plan> r2c_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::vector<std::complex<double>> complex_transform(
    std::span<const std::complex<double>> in, int sign) {
  if (in.empty()) throw ValidationError("fft: empty input");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().complex_plan(n, sign);
  std::vector<std::complex<double>> src(in.begin(), in.end());
  std::vector<std::complex<double>> dst(in.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(dst.data()));
  return dst;
}

}  // namespace

std::vector<std::complex<double>> fft_forward(std::span<const std::complex<double>> in) {
  return complex_transform(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft_inverse(std::span<const std::complex<double>> in) {
  auto out = complex_transform(in, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<std::complex<double>> rfft(std::span<const double> in) {
  if (in.empty()) throw ValidationError("fft: empty input");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().real_plan(n);
  std::vector<double> src(in.begin(), in.end());
  std::vector<std::complex<double>> dst(in.size() / 2 + 1);
  fftw_execute_dft_r2c(plan, src.data(),
                       reinterpret_cast<fftw_complex*>(dst.data()));
  return dst;
}

}  // namespace tlsfluc
