// SPDX-License-Identifier: Apache-2.0
//
// Entropy-gated client/server model selection with a dynamic threshold and
// a switching buffer (hold) against flutter.

#ifndef MSRL_SWITCHING_HPP_
#define MSRL_SWITCHING_HPP_

#include <cmath>
#include <deque>
#include <numeric>

#include "msrl/common.hpp"

namespace msrl {

enum class ModelChoice { kClient, kServer };

struct Selection {
  ModelChoice model = ModelChoice::kClient;
  bool dual_training = false;
};

struct SwitchConfig {
  double thr0 = 0.7;   // initial entropy threshold, nats
  double change = 0.005;  // threshold shift per server call
  int window = 16;     // W: entropy averaging window and flutter window
  int hold = 32;       // H: dual-training hold length
  int flutter_limit = 4;  // alternations within the window that trigger a hold
};

class SwitchController {
 public:
  SwitchController() = default;
  explicit SwitchController(const SwitchConfig& cfg) : cfg_(cfg), thr_(cfg.thr0) {
    if (cfg_.window < 1) throw ConfigError("switch window must be >= 1");
    if (cfg_.hold < 1) throw ConfigError("switch hold must be >= 1");
    if (cfg_.flutter_limit < 0) throw ConfigError("flutter_limit must be >= 0");
  }

  // Pushes the latest client-side entropy and decides which model acts.
  // Hold slots always use the server with dual training. Otherwise the
  // window-mean entropy is compared to the threshold; more than
  // flutter_limit alternations among the last W decisions switches to the
  // server now and holds it for the next H slots. Every server selection moves the threshold
  // to thr0 + server_calls * change.
  Selection select(double latest_entropy) {
    if (!std::isfinite(latest_entropy)) throw ContractError("entropy must be finite");
    entropies_.push_back(latest_entropy);
    while (static_cast<int>(entropies_.size()) > cfg_.window) entropies_.pop_front();
    const double mean = std::accumulate(entropies_.begin(), entropies_.end(), 0.0) /
                        static_cast<double>(entropies_.size());
    Selection sel;
    if (hold_remaining_ > 0) {
      --hold_remaining_;
      sel = {ModelChoice::kServer, true};
    } else {
      sel.model = mean > thr_ ? ModelChoice::kServer : ModelChoice::kClient;
      log_.push_back(sel.model);
      while (static_cast<int>(log_.size()) > cfg_.window) log_.pop_front();
      if (alternations() > cfg_.flutter_limit) {
        hold_remaining_ = cfg_.hold;
        log_.clear();
        sel = {ModelChoice::kServer, true};
        ++holds_;
      }
    }
    ++calls_;
    if (sel.model == ModelChoice::kServer) {
      ++server_calls_;
      thr_ = cfg_.thr0 + static_cast<double>(server_calls_) * cfg_.change;
    }
    return sel;
  }

  int alternations() const {
    int n = 0;
    for (std::size_t i = 1; i < log_.size(); ++i) n += log_[i] != log_[i - 1];
    return n;
  }

  double threshold() const { return thr_; }
  long long server_calls() const { return server_calls_; }
  long long calls() const { return calls_; }
  long long holds() const { return holds_; }
  int hold_remaining() const { return hold_remaining_; }
  const SwitchConfig& config() const { return cfg_; }
  const std::deque<double>& entropy_window() const { return entropies_; }
  const std::deque<ModelChoice>& switch_log() const { return log_; }

  // Restores persisted state (checkpoint resume).
  void restore(long long calls, long long server_calls, long long holds,
               int hold_remaining, std::deque<double> entropies,
               std::deque<ModelChoice> log) {
    calls_ = calls;
    server_calls_ = server_calls;
    holds_ = holds;
    hold_remaining_ = hold_remaining;
    entropies_ = std::move(entropies);
    log_ = std::move(log);
    thr_ = cfg_.thr0 + static_cast<double>(server_calls_) * cfg_.change;
  }

 private:
  SwitchConfig cfg_;
  double thr_ = 0.7;
  long long calls_ = 0;
  long long server_calls_ = 0;
  long long holds_ = 0;
  int hold_remaining_ = 0;
  std::deque<double> entropies_;
  std::deque<ModelChoice> log_;
};

}  // namespace msrl

#endif  // MSRL_SWITCHING_HPP_
