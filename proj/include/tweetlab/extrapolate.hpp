#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tweetlab/botmeter.hpp"

namespace tweetlab::extrapolate {

struct Stratum {
  std::size_t index = 0;  // 0 = most active
  std::uint64_t users = 0;
  std::uint64_t tweets = 0;
  std::uint64_t sampled = 0;
  std::uint64_t sampled_bots = 0;
  std::uint64_t sampled_tweets = 0;
  std::uint64_t sampled_bot_tweets = 0;
  double bot_rate = 0;     // sampled_bots / sampled, or the floor rate
  double volume_rate = 0;  // sampled_bot_tweets / sampled_tweets, or the floor
  bool floored = false;    // no sampled users; rate taken from the last sampled stratum
  double estimated_bots = 0;
  double estimated_bot_tweets = 0;
};

struct PopulationEstimate {
  std::uint64_t population = 0;
  std::uint64_t total_tweets = 0;
  double bot_count = 0;
  double bot_fraction = 0;
  double bot_tweet_volume = 0;
  double volume_fraction = 0;
  std::vector<Stratum> strata;
};

/// Stratified estimate of the bot population from labels on a sample of
/// the most active users.
///
/// Users are ordered by tweet count (descending, then author id) and cut into
/// `strata` groups holding roughly equal shares of the total tweet volume;
/// a user goes to stratum floor(strata * tweets_before_user / total_tweets).
/// Each sampled stratum contributes its sampled bot rate, counting undecided
/// users as not bots. Strata below the sample take the rate of the lowest
/// sampled stratum, so the result reads as a lower bound when bots
/// concentrate among heavy users.
///
/// `activity` is the full population (author -> tweets). Sample labels for
/// authors outside `activity` are ignored. Throws InsufficientStrata when no
/// stratum is sampled or the sampled strata are not the top ones without gaps.
PopulationEstimate extrapolate_population(const std::map<std::string, bot::BotLabel>& sample,
                                          const std::map<std::string, std::uint64_t>& activity,
                                          std::size_t strata = 10);

}  // namespace tweetlab::extrapolate
