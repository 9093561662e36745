#pragma once

#include <cmath>
#include <span>

namespace rmflab {

/*!
 * Compensated accumulator (Neumaier's variant of Kahan summation).
 *
 * Unlike plain Kahan, the compensation stays correct when the incoming term
 * is larger in magnitude than the running sum.
 */
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double value) {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_total(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

inline double compensated_mean(std::span<const double> values) {
  return values.empty() ? 0.0
                        : compensated_total(values) / static_cast<double>(values.size());
}

}  // namespace rmflab
