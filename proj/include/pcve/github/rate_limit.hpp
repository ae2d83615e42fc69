#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>

#include "pcve/common/http.hpp"
#include "pcve/common/random.hpp"
#include "pcve/common/time.hpp"

namespace pcve::github {

using Clock = std::function<Timestamp()>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

Clock system_clock();
Sleeper thread_sleeper();

// Token bucket whose capacity and refill instant come from the server's
// X-RateLimit-{Limit,Remaining,Reset} headers. Until the first response is
// observed the bucket is unbounded.
class QuotaBucket {
public:
  // Takes one token; returns how long the caller must wait first.
  std::chrono::milliseconds acquire(Timestamp now);
  void observe(const http::Response& response);

  std::optional<std::int64_t> remaining() const;

private:
  mutable std::mutex mutex_;
  std::optional<std::int64_t> limit_;
  std::optional<std::int64_t> remaining_;
  std::optional<Timestamp> reset_at_;
};

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{120000};
};

// Exponential backoff with jitter: a uniform draw from [d/2, d] where
// d = min(max_delay, base_delay * 2^attempt). A server Retry-After value wins
// when larger.
class Backoff {
public:
  Backoff(RetryPolicy policy, std::uint64_t seed) : policy_(policy), rng_(seed) {}

  std::chrono::milliseconds delay(int attempt, std::optional<std::chrono::milliseconds> retry_after = std::nullopt);
  const RetryPolicy& policy() const { return policy_; }

private:
  RetryPolicy policy_;
  std::mutex mutex_;
  Rng rng_;
};

}  // namespace pcve::github
