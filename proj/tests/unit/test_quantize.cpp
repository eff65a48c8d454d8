#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "dlr/error.hpp"
#include "dlr/oracles.hpp"
#include "dlr/quantize.hpp"

using namespace dlr;

TEST_CASE("group partition shapes") {
  const auto a = make_group_partition(4, 3, 8);
  REQUIRE(a.group_count() == 2);
  CHECK(a.groups[0] == std::vector<std::size_t>{0, 1});
  CHECK(a.groups[1] == std::vector<std::size_t>{2, 3});
  CHECK(a.samples_per_group() == std::vector<std::size_t>{4, 4});

  const auto b = make_group_partition(3, 4, 3);
  REQUIRE(b.group_count() == 1);
  CHECK(b.groups[0] == std::vector<std::size_t>{0, 1, 2});

  const auto c = make_group_partition(5, 3, 10);
  REQUIRE(c.group_count() == 3);
  CHECK(c.groups[2] == std::vector<std::size_t>{4});
  CHECK(c.samples_per_group() == std::vector<std::size_t>{4, 3, 3});
  CHECK(c.group_of(0) == 0);
  CHECK(c.group_of(4) == 1);

  CHECK_THROWS_AS(make_group_partition(4, 1, 8), Error);
  CHECK_THROWS_AS(make_group_partition(4, 21, 8), Error);
  CHECK_THROWS_AS(make_group_partition(0, 3, 8), Error);
  // Fewer samples than groups is allowed; the tail groups stay empty.
  CHECK(make_group_partition(6, 2, 4).samples_per_group() == std::vector<std::size_t>{1, 1, 1, 1, 0, 0});
}

TEST_CASE("partition covers every coordinate exactly once") {
  for (std::size_t d = 1; d <= 64; ++d)
    for (unsigned k = 2; k <= std::min<std::size_t>(d + 1, 20); ++k) {
      const auto a = make_group_partition(d, k, 100);
      std::vector<int> seen(d, 0);
      for (const auto& g : a.groups) {
        CHECK(g.size() <= k - 1);
        for (std::size_t j : g) ++seen[j];
      }
      for (int s : seen) CHECK(s == 1);
      const auto counts = a.samples_per_group();
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
}

TEST_CASE("encode_group bit layout") {
  const auto a = make_group_partition(4, 3, 8);
  CHECK(encode_group(LabeledSample{{1, -1, 1, 1}, 1}, a, 0).value == 3u);
  CHECK(encode_group(LabeledSample{{1, -1, 1, 1}, -1}, a, 0).value == 2u);
  // Sample 1 goes to group {3,4}: x3=-1, x4=+1, y=+1 -> 0b101.
  CHECK(encode_group(LabeledSample{{1, 1, -1, 1}, 1}, a, 1).value == 5u);
  CHECK_THROWS_AS(encode_group(LabeledSample{{1, 0.5, 1, 1}, 1}, a, 0), Error);
  CHECK_THROWS_AS(encode_group(LabeledSample{{1, 1, 1}, 1}, a, 0), Error);
  // A short last group leaves the high bits zero.
  const auto c = make_group_partition(5, 3, 10);
  CHECK(encode_group(LabeledSample{{1, 1, 1, 1, 1}, 1}, c, 2).value == 3u);
  CHECK_THROWS_AS(decode_group(Message(7, 3), c, 2), Error);
  CHECK_THROWS_AS(decode_group(Message(1, 3), c, 3), Error);
  CHECK_THROWS_AS(Message(8, 3), Error);
}

TEST_CASE("exhaustive round trip, d <= 6, all valid k") {
  for (std::size_t d = 1; d <= 6; ++d)
    for (unsigned k = 2; k <= d + 1; ++k) {
      const auto a = make_group_partition(d, k, 2 * d);
      for (const Atom& atom : oracle::hypercube_atoms(d))
        for (int y : {-1, 1})
          for (std::size_t i = 0; i < a.group_count(); ++i) {
            const Message m = encode_group(LabeledSample{atom.x, y}, a, i);
            CHECK(m.value < (1u << k));
            const DecodedGroup g = decode_group(m, a, i);
            CHECK(g.label == y);
            for (std::size_t b = 0; b < a.groups[i].size(); ++b) CHECK(g.components[b] == atom.x[a.groups[i][b]]);
          }
    }
}

TEST_CASE("label-only quantizer") {
  const Quantizer q = Quantizer::label_only();
  Engine rng = make_engine(1);
  CHECK(q.bits() == 1);
  CHECK(q.encode(LabeledSample{{0.3, -2.0}, 1}, rng).value == 1u);
  CHECK(q.encode(LabeledSample{{0.3, -2.0}, -1}, rng).value == 0u);
  const ChannelTable t = q.channel_for(DistributionSpec::uniform_hypercube(2));
  for (std::size_t a = 0; a < t.atoms(); ++a)
    for (int y : {-1, 1}) CHECK(t.q(a, y, 0) + t.q(a, y, 1) == 1.0);
}

TEST_CASE("stochastic tables") {
  // Identity on a 2-point support with k=1.
  std::vector<double> id{1, 0, 0, 1, 1, 0, 0, 1};
  const Quantizer q = stochastic_quantizer_from_table(1, 2, id);
  CHECK(q.bits() == 1);
  CHECK(q.channel_for(DistributionSpec::finite_support({Atom{{1.0}, 0.5}, Atom{{-1.0}, 0.5}})).q(1, 1, 1) == 1.0);

  std::vector<double> bad{0.5, 0.4, 0, 1};
  try {
    ChannelTable::stochastic(1, 1, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("x-index=0, y=-1") != std::string::npos);
  }
  CHECK_THROWS_AS(ChannelTable::stochastic(1, 1, {-0.1, 1.1, 0.5, 0.5}), Error);

  Engine rng = make_engine(8);
  const ChannelTable t = random_channel_table(3, 2, rng);
  for (std::size_t a = 0; a < 3; ++a)
    for (int y : {-1, 1}) {
      double s = 0.0;
      for (std::uint32_t m = 0; m < 4; ++m) s += t.q(a, y, m);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[t.sample(1, -1, rng)];
  for (std::uint32_t m = 0; m < 4; ++m) CHECK(std::abs(counts[m] / double(draws) - t.q(1, -1, m)) < 0.01);

  const Quantizer u = Quantizer::uniform(3);
  const ChannelTable ut = u.channel_for(DistributionSpec::uniform_hypercube(2));
  CHECK(ut.q(2, 1, 5) == 0.125);
  CHECK_FALSE(u.is_deterministic());
}

TEST_CASE("relabelling permutes columns") {
  Engine rng = make_engine(4);
  const ChannelTable t = random_channel_table(2, 2, rng);
  const std::vector<std::uint32_t> perm{2, 0, 3, 1};
  const ChannelTable r = t.relabeled(perm);
  for (std::size_t a = 0; a < 2; ++a)
    for (int y : {-1, 1})
      for (std::uint32_t m = 0; m < 4; ++m) CHECK(r.q(a, y, perm[m]) == t.q(a, y, m));
  CHECK_THROWS_AS(t.relabeled(std::vector<std::uint32_t>{0, 0, 1, 2}), Error);
}

TEST_CASE("group quantizer channel matches encode_group") {
  const auto a = make_group_partition(4, 3, 8);
  const Quantizer q = Quantizer::group_partition(a, 1);
  const auto cube = DistributionSpec::uniform_hypercube(4);
  const ChannelTable t = q.channel_for(cube);
  const auto atoms = oracle::hypercube_atoms(4);
  Engine rng = make_engine(2);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (int y : {-1, 1}) {
      const LabeledSample s{atoms[i].x, y};
      CHECK(t.message_of_row(ChannelTable::row_index(i, y)) == encode_group(s, a, 1).value);
      CHECK(q.encode(s, rng).value == encode_group(s, a, 1).value);
    }
  CHECK_THROWS_AS(Quantizer::group_partition(a, 2), Error);
}

TEST_CASE("channel CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "dlr_test_quantize";
  std::filesystem::create_directories(dir);
  Engine rng = make_engine(6);
  const ChannelTable t = random_channel_table(4, 2, rng);
  write_channel_csv(t, dir / "t.csv");
  const ChannelTable back = load_channel_csv(dir / "t.csv");
  CHECK(back.atoms() == 4);
  CHECK(back.bits() == 2);
  for (std::size_t a = 0; a < 4; ++a)
    for (int y : {-1, 1})
      for (std::uint32_t m = 0; m < 4; ++m) CHECK(back.q(a, y, m) == t.q(a, y, m));

  std::ofstream(dir / "bad.csv") << "x-index,y,m,probability\n0,1,0,0.5\n0,1,1,0.4\n0,-1,0,1\n";
  CHECK_THROWS_AS(load_channel_csv(dir / "bad.csv"), Error);
  CHECK_THROWS_AS(load_channel_csv(dir / "missing.csv"), Error);
  std::filesystem::remove_all(dir);
}
