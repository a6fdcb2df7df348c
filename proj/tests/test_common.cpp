#include <doctest.h>

#include <atomic>

#include "tweetlab/common.hpp"
#include "tweetlab/csv.hpp"
#include "tweetlab/kvconfig.hpp"
#include "tweetlab/rng.hpp"

using namespace tweetlab;

TEST_CASE("timestamps parse in the formats archives use") {
  CHECK(parse_timestamp("1473984000") == 1473984000);
  CHECK(parse_timestamp("2016-09-16T00:00:00Z") == 1473984000);
  CHECK(parse_timestamp("2016-09-16 00:00:00") == 1473984000);
  CHECK(parse_timestamp("Fri Sep 16 00:00:00 +0000 2016") == 1473984000);
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK(format_day(1473984000 + 86399) == "2016-09-16");
  CHECK(format_timestamp(from_civil(2016, 10, 21, 12, 30, 5)) == "2016-10-21T12:30:05Z");
  CHECK(utc_day_index(-1) == -1);
}

TEST_CASE("format_double round-trips and is stable") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("string helpers") {
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(trim("  x \t") == "x");
  CHECK(to_lower_ascii("MiXeD") == "mixed");
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
}

TEST_CASE("parallel_for covers every index once") {
  for (unsigned w : {1u, 2u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), w, [&](std::size_t b, std::size_t e, unsigned) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t b, std::size_t, unsigned) {
                    if (b > 0) throw DataError("boom");
                  }),
                  DataError);
}

TEST_CASE("csv escapes and parses quoted fields") {
  csv::Writer w({"a", "b"});
  w.row({"x,y", "say \"hi\"\nthere"});
  const auto t = csv::parse(w.str());
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "x,y");
  CHECK(t.rows[0][1] == "say \"hi\"\nthere");
  CHECK(t.column("b") == 1);
  CHECK_THROWS(t.column("c"));
}

TEST_CASE("key-value config") {
  auto cfg = KeyValueConfig::parse("# comment\na = 1\nb = x, y ,, z\nflag = yes\npath = sub/f.txt\n", "/base");
  CHECK(cfg.get_int("a", 0) == 1);
  CHECK(cfg.get_list("b") == std::vector<std::string>{"x", "y", "z"});
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_path("path") == std::filesystem::path("/base/sub/f.txt"));
  CHECK(cfg.unused_keys().empty());
  auto bad = KeyValueConfig::parse("n = abc\n");
  CHECK_THROWS_AS(bad.get_int("n", 0), ConfigError);
  CHECK(bad.get_double("missing", 2.5) == 2.5);
  CHECK(bad.unused_keys().empty());
  auto typo = KeyValueConfig::parse("lexcon = x\n");
  CHECK(typo.unused_keys() == std::vector<std::string>{"lexcon"});
  CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign\n"), ConfigError);
}

TEST_CASE("rng is reproducible and in range") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(9);
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(7);
    CHECK(v < 7);
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
