#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace tvn {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Worker count for node-parallel loops. Honours the TVN_NUM_THREADS
/// environment variable; defaults to the hardware concurrency.
unsigned worker_threads();

/// Calls body(i) for i in [0, n), split into contiguous blocks over
/// worker_threads() threads. body must only write to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tvn
