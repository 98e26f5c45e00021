// units.hpp - angular frequencies and rates.
//
// Everything inside the library is angular (rad/s for frequencies, 1/s for
// rates). The helpers below are the only places where ordinary frequencies
// (GHz) or "units of Γ_1D" enter or leave.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wgqed {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kGiga = 1e9;

class AngularFrequency {
public:
  constexpr AngularFrequency() = default;

  static AngularFrequency from_rad_per_s(double w) { return AngularFrequency(checked(w)); }
  /// x GHz (ordinary frequency) -> 2π·x·10⁹ rad/s.
  static AngularFrequency from_ghz(double ghz) { return AngularFrequency(checked(ghz * (kTwoPi * kGiga))); }
  /// x in units of a reference rate (usually Γ_1D).
  static AngularFrequency in_units_of(double x, double reference_rate) {
    return AngularFrequency(checked(x * reference_rate));
  }

  constexpr double rad_per_s() const { return value_; }
  double to_ghz() const { return value_ / (kTwoPi * kGiga); }
  double in_units_of(double reference_rate) const { return value_ / reference_rate; }

  friend constexpr AngularFrequency operator+(AngularFrequency a, AngularFrequency b) {
    return AngularFrequency(a.value_ + b.value_);
  }
  friend constexpr AngularFrequency operator-(AngularFrequency a, AngularFrequency b) {
    return AngularFrequency(a.value_ - b.value_);
  }
  friend constexpr AngularFrequency operator*(double s, AngularFrequency a) { return AngularFrequency(s * a.value_); }
  friend constexpr bool operator==(AngularFrequency, AngularFrequency) = default;

private:
  constexpr explicit AngularFrequency(double w) : value_(w) {}
  static double checked(double w) {
    if (!std::isfinite(w)) throw std::invalid_argument("AngularFrequency: value must be finite");
    return w;
  }
  double value_ = 0.0;
};

/// Rates are plain doubles in 1/s; configs specify them in 1/ns.
inline constexpr double per_ns(double x) { return x * kGiga; }
inline constexpr double to_per_ns(double rate) { return rate / kGiga; }

}  // namespace wgqed
