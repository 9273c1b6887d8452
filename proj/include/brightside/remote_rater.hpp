#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "brightside/ordinal.hpp"

namespace brightside {

struct RemoteRaterConfig {
  std::string endpoint;  // base URL; requests go to <endpoint>/v1/rate
  std::chrono::milliseconds timeout{10000};
  std::size_t max_batch = 64;
};

inline constexpr std::size_t kRemoteInFlightCap = 4;

// Client for an external 1-5 rating service.
//
//   POST /v1/rate {"texts": [...]}
//   200 {"ratings": [r, ...], "probs": [[p1..p5], ...]}
//
// Anything other than a schema-valid 200 with one entry per text, in order,
// is a failure. At most kRemoteInFlightCap requests run per endpoint.
class RemoteRater {
 public:
  explicit RemoteRater(RemoteRaterConfig cfg);

  const RemoteRaterConfig& config() const noexcept { return cfg_; }

  // Throws Errc::InvalidArgument for an empty or oversize batch and
  // Errc::StageFailure for timeouts, transport errors, non-200 responses and
  // schema violations.
  std::vector<Rating> rate(std::span<const std::string> texts) const;

 private:
  RemoteRaterConfig cfg_;
};

// Validates a response body against the wire schema for `expected` texts.
// Throws Errc::StageFailure on any violation.
std::vector<Rating> parse_rating_response(std::string_view body, std::size_t expected);

}  // namespace brightside
