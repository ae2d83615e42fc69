#include "pcve/github/rate_limit.hpp"

#include <algorithm>
#include <string>
#include <thread>

namespace pcve::github {

Clock system_clock() {
  return [] {
    return Timestamp(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
  };
}

Sleeper thread_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

namespace {

std::optional<std::int64_t> header_int(const http::Response& response, const char* name) {
  auto value = response.header(name);
  if (!value) return std::nullopt;
  try {
    return std::stoll(*value);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::chrono::milliseconds QuotaBucket::acquire(Timestamp now) {
  std::lock_guard lock(mutex_);
  if (!remaining_) return std::chrono::milliseconds(0);
  if (*remaining_ > 0) {
    --*remaining_;
    return std::chrono::milliseconds(0);
  }
  std::chrono::milliseconds wait(0);
  if (reset_at_ && now < *reset_at_) {
    wait = std::chrono::seconds(reset_at_->unix_seconds() - now.unix_seconds() + 1);
  }
  // After the reset the window refills; this caller spends the first token.
  remaining_ = limit_ ? std::max<std::int64_t>(*limit_ - 1, 0) : 0;
  if (!limit_) remaining_.reset();
  return wait;
}

void QuotaBucket::observe(const http::Response& response) {
  auto limit = header_int(response, "x-ratelimit-limit");
  auto remaining = header_int(response, "x-ratelimit-remaining");
  auto reset = header_int(response, "x-ratelimit-reset");
  std::lock_guard lock(mutex_);
  if (limit) limit_ = limit;
  if (remaining) remaining_ = remaining;
  if (reset) reset_at_ = Timestamp::from_unix(*reset);
}

std::optional<std::int64_t> QuotaBucket::remaining() const {
  std::lock_guard lock(mutex_);
  return remaining_;
}

std::chrono::milliseconds Backoff::delay(int attempt, std::optional<std::chrono::milliseconds> retry_after) {
  using std::chrono::milliseconds;
  const double cap = static_cast<double>(policy_.max_delay.count());
  double full = static_cast<double>(policy_.base_delay.count());
  for (int i = 0; i < attempt && full < cap; ++i) full *= 2;
  full = std::min(full, cap);
  double jitter;
  {
    std::lock_guard lock(mutex_);
    jitter = rng_.unit();
  }
  auto chosen = milliseconds(static_cast<std::int64_t>(full / 2 + jitter * full / 2));
  if (retry_after && *retry_after > chosen) chosen = *retry_after;
  return chosen;
}

}  // namespace pcve::github
