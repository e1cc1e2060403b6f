#pragma once

#include <chrono>

namespace naloss {

/// Wall-clock quantity in seconds.
using Duration = std::chrono::duration<double>;

/// Gate execution times. These are modelling knobs, not measured values.
struct GateDurations {
  Duration oneQubit = std::chrono::microseconds(2);
  Duration twoQubit = std::chrono::microseconds(3);
  Duration threeQubit = std::chrono::microseconds(5);
  Duration swap = std::chrono::microseconds(9); // three CX

  friend bool operator==(const GateDurations&, const GateDurations&) = default;
};

/// Device timing outside the gates themselves.
struct TimingModel {
  Duration fluorescence = std::chrono::milliseconds(6);
  Duration reload = std::chrono::milliseconds(320);
  Duration tableRead = std::chrono::nanoseconds(40);
  Duration tableWrite = std::chrono::nanoseconds(45);
  GateDurations gates;

  friend bool operator==(const TimingModel&, const TimingModel&) = default;
};

} // namespace naloss
