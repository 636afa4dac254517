#pragma once

#include <cstddef>
#include <vector>

namespace dca {

// Fixed-lag FIFO: push(v) returns the value pushed `lag` calls earlier, or a
// default-constructed T while the line is still filling.
template <typename T>
class DelayLine {
 public:
  DelayLine() = default;
  explicit DelayLine(std::size_t lag) : buf_(lag) {}

  std::size_t lag() const { return buf_.size(); }

  T push(const T& v) {
    if (buf_.empty()) return v;
    T out = buf_[head_];
    buf_[head_] = v;
    head_ = (head_ + 1) % buf_.size();
    return out;
  }

 private:
  std::vector<T> buf_;
  std::size_t head_ = 0;
};

// Ring of the most recent per-step values; ago(0) is the latest record.
// Unrecorded history reads as zero.
class History {
 public:
  History() = default;
  explicit History(std::size_t depth) : buf_(depth + 1, 0.0) {}

  void record(double v) {
    head_ = (head_ + 1) % buf_.size();
    buf_[head_] = v;
  }

  double ago(std::size_t steps) const {
    const std::size_t n = buf_.size();
    return buf_[(head_ + n - steps % n) % n];
  }

 private:
  std::vector<double> buf_{0.0};
  std::size_t head_ = 0;
};

}  // namespace dca
