#include "tweetlab/extrapolate.hpp"

#include <algorithm>

namespace tweetlab::extrapolate {

PopulationEstimate extrapolate_population(const std::map<std::string, bot::BotLabel>& sample,
                                          const std::map<std::string, std::uint64_t>& activity,
                                          std::size_t strata) {
  if (strata == 0) throw ConfigError("number of strata must be positive");
  PopulationEstimate est;
  est.population = activity.size();
  for (const auto& [id, n] : activity) est.total_tweets += n;
  if (activity.empty()) throw InsufficientStrata("empty population");

  std::vector<std::pair<std::string_view, std::uint64_t>> order(activity.begin(), activity.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  est.strata.resize(strata);
  for (std::size_t s = 0; s < strata; ++s) est.strata[s].index = s;
  std::uint64_t before = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& [id, n] = order[i];
    // Volume share when there is volume; plain rank share otherwise.
    const std::uint64_t num = (est.total_tweets > 0 ? before : i) * strata;
    const std::uint64_t den = est.total_tweets > 0 ? est.total_tweets : order.size();
    const auto s = std::min<std::size_t>(static_cast<std::size_t>(num / den), strata - 1);
    before += n;
    auto& st = est.strata[s];
    ++st.users;
    st.tweets += n;
    const auto it = sample.find(std::string(id));
    if (it == sample.end()) continue;
    ++st.sampled;
    st.sampled_tweets += n;
    if (it->second == bot::BotLabel::bot) {
      ++st.sampled_bots;
      st.sampled_bot_tweets += n;
    }
  }

  std::size_t sampled_prefix = 0;
  while (sampled_prefix < strata && est.strata[sampled_prefix].sampled > 0) ++sampled_prefix;
  if (sampled_prefix == 0) throw InsufficientStrata("the sample covers no activity stratum");
  for (std::size_t s = sampled_prefix; s < strata; ++s)
    if (est.strata[s].sampled > 0)
      throw InsufficientStrata("sampled strata are not contiguous from the most active one (stratum " +
                               std::to_string(s) + " sampled after a gap)");

  double floor_rate = 0;
  double floor_volume = 0;
  const double n_pop = static_cast<double>(est.population);
  const double n_tweets = static_cast<double>(est.total_tweets);
  for (auto& st : est.strata) {
    if (st.sampled > 0) {
      st.bot_rate = static_cast<double>(st.sampled_bots) / static_cast<double>(st.sampled);
      st.volume_rate = st.sampled_tweets > 0 ? static_cast<double>(st.sampled_bot_tweets) /
                                                   static_cast<double>(st.sampled_tweets)
                                             : st.bot_rate;
      floor_rate = st.bot_rate;
      floor_volume = st.volume_rate;
    } else {
      st.floored = true;
      st.bot_rate = floor_rate;
      st.volume_rate = floor_volume;
    }
    st.estimated_bots = static_cast<double>(st.users) * st.bot_rate;
    st.estimated_bot_tweets = static_cast<double>(st.tweets) * st.volume_rate;
    est.bot_count += st.estimated_bots;
    est.bot_tweet_volume += st.estimated_bot_tweets;
    est.bot_fraction += static_cast<double>(st.users) / n_pop * st.bot_rate;
    if (est.total_tweets > 0) est.volume_fraction += static_cast<double>(st.tweets) / n_tweets * st.volume_rate;
  }
  return est;
}

}  // namespace tweetlab::extrapolate
