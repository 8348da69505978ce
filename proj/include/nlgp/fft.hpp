#pragma once

#include <fftw3.h>

#include <cassert>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>

namespace nlgp::fft {

enum class direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

// FFTW planning is not thread-safe, execution with new arrays is.
class plan_cache {
public:
  static plan_cache& instance()
  {
    static plan_cache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, direction dir)
  {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, static_cast<int>(dir));
    if (auto it = plans_.find(key); it != plans_.end())
      return it->second;
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, static_cast<int>(dir),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, p);
    return p;
  }

  plan_cache(const plan_cache&) = delete;
  plan_cache& operator=(const plan_cache&) = delete;

  ~plan_cache()
  {
    for (auto& entry : plans_)
      fftw_destroy_plan(entry.second);
  }

private:
  plan_cache() = default;
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

} // namespace detail

// out[m] = sum_n in[n] exp(s * 2 pi i m n / N) with s = -1 (forward) or +1 (backward).
// Unnormalized; in and out must not alias.
inline void execute(std::span<const std::complex<double>> in,
                    std::span<std::complex<double>> out, direction dir)
{
  assert(in.size() == out.size());
  assert(in.data() != out.data());
  fftw_plan p = detail::plan_cache::instance().get(in.size(), dir);
  // out-of-place complex transforms leave the input untouched
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  fftw_execute_dft(p, src, reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace nlgp::fft
