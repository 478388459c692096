#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "semno/error.hpp"
#include "semno/infuse.hpp"
#include "semno/rng.hpp"

using namespace semno;

namespace {

CleanSentence sentence(std::size_t len, const std::string& doc = "d", std::size_t index = 0) {
  CleanSentence s{doc, index, ClassLabel("Service Brakes"), {}};
  for (std::size_t i = 0; i < len; ++i) s.tokens.push_back("w" + std::to_string(i));
  return s;
}

// ceil(log2(len)/2) evaluated in long double as an independent check.
std::size_t frequency_by_log(std::size_t len) {
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<long double>(len)) / 2.0L));
}

}  // namespace

TEST_CASE("infusion frequency table") {
  const std::map<std::size_t, std::size_t> table = {{1, 0},  {2, 1},  {3, 1}, {4, 1}, {8, 2},
                                                    {10, 2}, {16, 2}, {17, 3}, {1024, 5}};
  for (const auto& [len, expected] : table) {
    CAPTURE(len);
    CHECK(infusion_frequency(len) == expected);
    CHECK(frequency_by_log(len) == expected);
  }
}

TEST_CASE("infusion frequency agrees with the log formula, is feasible and grows by half-logs") {
  for (std::size_t len = 1; len <= 10000; ++len) {
    CAPTURE(len);
    const std::size_t f = infusion_frequency(len);
    CHECK(f == frequency_by_log(len));
    CHECK((len + 1) / 2 >= f);
    CHECK(f <= infusion_frequency(2 * len));
    CHECK(infusion_frequency(2 * len) <= f + 1);
  }
}

TEST_CASE("anchor surface") {
  CHECK(anchor_surface(ClassLabel("Service Brakes")) == "A_Service-Brakes");
  CHECK(is_anchor("A_Seat-Belts"));
  CHECK_FALSE(is_anchor("brakes"));
}

TEST_CASE("non-adjacent draws are uniform over all valid subsets") {
  // len 6, count 2: C(5,2) = 10 non-adjacent pairs.
  Rng rng(8);
  std::map<std::vector<std::size_t>, int> seen;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) ++seen[draw_non_adjacent(rng, 6, 2)];
  CHECK(seen.size() == 10);
  for (const auto& [subset, n] : seen) {
    CHECK(subset[1] - subset[0] >= 2);
    CHECK(std::abs(n - draws / 10) < 5 * std::sqrt(draws / 10.0));
  }
  CHECK_THROWS_AS(draw_non_adjacent(rng, 3, 3), RuntimeFailure);
  CHECK(draw_non_adjacent(rng, 5, 3) == std::vector<std::size_t>{0, 2, 4});
}

TEST_CASE("a ten-token brake complaint receives two separated anchors") {
  CleanSentence s{"d", 0, ClassLabel("Service-Brakes"),
                  {"right", "front", "wheel", "locked", "vehicle", "spin", "response", "anti",
                   "lock", "brakes"}};
  Rng rng(42);
  const InfusedSentence out = infuse_sentence(s, rng);
  CHECK(std::count(out.tokens.begin(), out.tokens.end(), "A_Service-Brakes") == 2);
  REQUIRE(out.anchor_positions.size() == 2);
  CHECK(out.anchor_positions[1] - out.anchor_positions[0] >= 2);
  Rng again(42);
  CHECK(infuse_sentence(s, again) == out);
}

TEST_CASE("short and empty sentences") {
  Rng rng(1);
  const auto one = infuse_sentence(sentence(1), rng);
  CHECK(one.tokens == std::vector<std::string>{"w0"});
  CHECK(one.anchor_positions.empty());
  const auto none = infuse_sentence(sentence(0), rng);
  CHECK(none.tokens.empty());
}

TEST_CASE("property: anchor count, placement and strip inverse on random sentences") {
  Rng rng(2024);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t len = 1 + uniform_below(rng, 60);
    const CleanSentence s = sentence(len);
    const InfusedSentence out = infuse_sentence(s, rng);
    const auto anchors = std::count_if(out.tokens.begin(), out.tokens.end(),
                                       [](const std::string& w) { return is_anchor(w); });
    REQUIRE(static_cast<std::size_t>(anchors) == infusion_frequency(len));
    REQUIRE(out.anchor_positions.size() == infusion_frequency(len));
    for (std::size_t i = 1; i < out.anchor_positions.size(); ++i) {
      REQUIRE(out.anchor_positions[i] >= out.anchor_positions[i - 1] + 2);
    }
    for (std::size_t p : out.anchor_positions) REQUIRE(p < len);
    // Anchor before the token at each drawn index.
    std::size_t shift = 0;
    for (std::size_t p : out.anchor_positions) {
      REQUIRE(is_anchor(out.tokens[p + shift]));
      REQUIRE(out.tokens[p + shift + 1] == s.tokens[p]);
      ++shift;
    }
    REQUIRE(strip_anchors(out) == s);
    REQUIRE(from_token_sentence(as_token_sentence(out)) == out);
  }
}

TEST_CASE("corpus infusion is independent of corpus order") {
  std::vector<CleanSentence> corpus;
  for (std::size_t i = 0; i < 40; ++i) corpus.push_back(sentence(1 + i % 13, "doc" + std::to_string(i / 5), i % 5));
  const auto forward = infuse_corpus(corpus, 99);
  std::vector<CleanSentence> reversed(corpus.rbegin(), corpus.rend());
  auto backward = infuse_corpus(reversed, 99);
  std::reverse(backward.begin(), backward.end());
  CHECK(forward == backward);
  CHECK(infuse_corpus(std::vector<CleanSentence>{}, 99).empty());
  for (const auto& s : forward) {
    for (const auto& w : s.tokens) {
      if (is_anchor(w)) CHECK(w == "A_Service-Brakes");
    }
  }
  CHECK(infuse_corpus(corpus, 100) != forward);
}
