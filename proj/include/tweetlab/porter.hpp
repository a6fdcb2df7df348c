#pragma once

#include <string>
#include <string_view>

namespace tweetlab::text {

/// Porter (1980) suffix-stripping stemmer, following the reference C
/// implementation including its two published departures (-bli -> -ble,
/// -logi -> -log). Expects a lowercase word; words of two letters or fewer
/// are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace tweetlab::text
