#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gfchan/drift.hpp"
#include "gfchan/message.hpp"

namespace gfchan {

// A channel instance: drift functional, message law, horizon and the average
// power limit P of the hypothesis (1/T) int_0^T E[g^2] ds <= P. The limit is
// monitored, never enforced at runtime.
struct ChannelSpec {
  ChannelDrift drift;
  Message message;
  double horizon;
  double power_limit;

  ChannelSpec(ChannelDrift d, Message m, double T, double P)
      : drift(std::move(d)), message(std::move(m)), horizon(T), power_limit(P) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("ChannelSpec: horizon must be > 0");
    if (!(power_limit > 0.0) || !std::isfinite(power_limit)) throw std::invalid_argument("ChannelSpec: power limit must be > 0");
  }
};

}  // namespace gfchan
