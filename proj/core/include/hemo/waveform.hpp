#ifndef HEMO_WAVEFORM_HPP
#define HEMO_WAVEFORM_HPP

#include <vector>

namespace hemo {

/// Scalar function of time: a constant or a piecewise-linear sampled table.
/// Tables are held constant beyond their ends unless periodic.
class Waveform {
 public:
  Waveform() = default;
  explicit Waveform(double value) : values_{value} {}

  static Waveform constant(double value) { return Waveform(value); }
  static Waveform table(std::vector<double> times, std::vector<double> values, bool periodic = false);
  /// Linear ramp from zero to `target` over [0, ramp_time], then constant.
  static Waveform ramped(double target, double ramp_time);

  double operator()(double t) const;

  bool is_constant() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_{0.0};
  bool periodic_ = false;
};

}  // namespace hemo

#endif  // HEMO_WAVEFORM_HPP
