#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pcve {

// A UTC instant with whole-second resolution. Sub-second parts and zone
// offsets in parsed strings are normalized away on construction.
class Timestamp {
public:
  using Clock = std::chrono::system_clock;
  using Seconds = std::chrono::sys_seconds;

  constexpr Timestamp() = default;
  constexpr explicit Timestamp(Seconds at) : at_(at) {}

  static Timestamp from_unix(std::int64_t seconds);
  static Timestamp from_date(int year, unsigned month, unsigned day);

  // Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with optional "Z" or
  // "+HH:MM"/"-HH:MM" suffix. A missing zone designator means UTC.
  static Timestamp parse(std::string_view text);

  std::int64_t unix_seconds() const { return at_.time_since_epoch().count(); }
  Seconds time_point() const { return at_; }
  int year() const;

  // "YYYY-MM-DDTHH:MM:SSZ"
  std::string iso8601() const;
  std::string date_string() const;

  Timestamp plus_days(std::int64_t days) const;

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
  Seconds at_{};
};

// Whole days from `earlier` to `later`, floored (negative when later < earlier).
std::int64_t floor_days_between(Timestamp earlier, Timestamp later);

}  // namespace pcve
