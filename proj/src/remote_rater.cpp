#include "brightside/remote_rater.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>

#include <json.hpp>

#include "brightside/error.hpp"
#include "brightside/http_client.hpp"
#include "brightside/url.hpp"

namespace brightside {

namespace {

using InFlight = std::counting_semaphore<kRemoteInFlightCap>;

std::shared_ptr<InFlight> in_flight_for(const std::string& endpoint) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<InFlight>> slots;
  std::lock_guard lock(mu);
  auto& slot = slots[endpoint];
  if (!slot) slot = std::make_shared<InFlight>(static_cast<std::ptrdiff_t>(kRemoteInFlightCap));
  return slot;
}

class SlotGuard {
 public:
  explicit SlotGuard(std::shared_ptr<InFlight> s) : s_(std::move(s)) { s_->acquire(); }
  ~SlotGuard() { s_->release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::shared_ptr<InFlight> s_;
};

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::StageFailure, what); }

}  // namespace

RemoteRater::RemoteRater(RemoteRaterConfig cfg) : cfg_(std::move(cfg)) {
  if (!parse_url(cfg_.endpoint)) throw Error(Errc::ConfigError, "bad rater endpoint: " + cfg_.endpoint);
  if (cfg_.max_batch < 1) throw Error(Errc::ConfigError, "max_batch must be >= 1");
}

std::vector<Rating> parse_rating_response(std::string_view body, std::size_t expected) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail("rating response is not a JSON object");
  if (!j.contains("ratings") || !j["ratings"].is_array() || !j.contains("probs") ||
      !j["probs"].is_array())
    fail("rating response lacks ratings/probs arrays");
  const auto& ratings = j["ratings"];
  const auto& probs = j["probs"];
  if (ratings.size() != expected || probs.size() != expected)
    fail("rating response length does not match the request");

  std::vector<Rating> out(expected);
  for (std::size_t k = 0; k < expected; ++k) {
    if (!ratings[k].is_number_integer()) fail("rating is not an integer");
    int r = ratings[k].get<int>();
    if (r < 1 || r > kRatingLevels) fail("rating outside [1,5]");
    const auto& p = probs[k];
    if (!p.is_array() || p.size() != kRatingLevels) fail("probability vector must have 5 entries");
    double sum = 0.0;
    for (std::size_t c = 0; c < kRatingLevels; ++c) {
      if (!p[c].is_number()) fail("probability is not a number");
      double v = p[c].get<double>();
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) fail("probability outside [0,1]");
      out[k].probs[c] = v;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-3) fail("probabilities do not sum to 1");
    out[k].rating = r;
  }
  return out;
}

std::vector<Rating> RemoteRater::rate(std::span<const std::string> texts) const {
  if (texts.empty() || texts.size() > cfg_.max_batch)
    throw Error(Errc::InvalidArgument, "rating batch must hold 1..max_batch texts");

  auto url = parse_url(cfg_.endpoint);
  std::string path = url->path;
  if (!path.empty() && path.back() == '/') path.pop_back();
  path += "/v1/rate";

  nlohmann::json req = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};

  SlotGuard slot(in_flight_for(url->origin()));
  Url target = *url;
  target.path = path;
  target.query.clear();
  auto res = http_post_json(target.origin() + target.target(), req.dump(), cfg_.timeout);
  if (!res.response) fail("rating request failed: " + res.error);
  if (res.response->status != 200)
    fail("rating service returned HTTP " + std::to_string(res.response->status));
  return parse_rating_response(res.response->body, texts.size());
}

}  // namespace brightside
