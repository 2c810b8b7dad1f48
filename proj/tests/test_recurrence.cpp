#include <gtest/gtest.h>

#include <random>

#include "recur/recurrence.hpp"

using namespace recur;

namespace {
ClopenSet ones() { return ClopenSet(1, {Word("1")}); }
ClopenSet zeros() { return ClopenSet(1, {Word("0")}); }

// Independent witness test: read bits straight from the source.
bool naive_witness(const SequenceSource& z, const ClopenSet& p, std::size_t k, std::size_t n) {
  for (std::size_t i = 1; i <= k; ++i) {
    std::string w;
    for (std::size_t j = 0; j < p.granularity(); ++j) w.push_back(z.bit(n * i + j) ? '1' : '0');
    bool found = false;
    for (const auto& f : p.words()) found = found || f.to_string() == w;
    if (!found) return false;
  }
  return true;
}
}  // namespace

TEST(IsWitness, Examples) {
  EXPECT_TRUE(is_witness(SequenceSource::constant(true), ones(), 3, 1));
  EXPECT_FALSE(is_witness(SequenceSource::explicit_prefix(Word("0"), true), zeros(), 1, 1));
  // Z = 0100100010000..., ones at positions 1, 4, 8, 13, ...
  Word z("01001000100001000001");
  auto src = SequenceSource::from_word(z);
  EXPECT_TRUE(is_witness(src, ones(), 2, 4));
  EXPECT_EQ(is_witness(src, ones(), 2, 4), z[4] && z[8]);
  EXPECT_FALSE(is_witness(src, ones(), 2, 2));
  EXPECT_THROW(is_witness(src, ones(), 2, 0), OutOfRange);
  EXPECT_THROW(is_witness(src, ones(), 2, 10), InsufficientData);
}

TEST(FindWitness, FullSpaceAndEmptyTail) {
  auto full = ClopenSet::full(1);
  auto r = find_witness(RecurrenceQuery<ClopenSet>{SequenceSource::seeded(3), full, 4, 10});
  EXPECT_EQ(r.witness, 1u);
  for (std::size_t n_max : {1u, 10u, 300u}) {
    auto none = find_witness(RecurrenceQuery<ClopenSet>{SequenceSource::constant(false), ones(), 1, n_max});
    EXPECT_FALSE(none.witness.has_value());
    EXPECT_EQ(none.checked_range, n_max);
  }
}

TEST(FindWitness, SeededAgainstExhaustiveScan) {
  ClopenSet p(2, {Word("11")});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RecurrenceQuery<ClopenSet> q{SequenceSource::seeded(seed), p, 2, 64};
    auto report = find_witness(q);
    std::optional<std::size_t> expected;
    for (std::size_t n = 1; n <= 64 && !expected; ++n) {
      if (naive_witness(q.source, p, 2, n)) expected = n;
    }
    EXPECT_EQ(report.witness, expected) << seed;
    EXPECT_TRUE(recheck(q, report));
    if (report.witness) {
      ASSERT_EQ(report.evidence.size(), 2u);
      for (const auto& e : report.evidence) {
        EXPECT_TRUE(e.admitted);
        EXPECT_EQ(e.offset, *report.witness * e.i);
      }
    }
  }
}

TEST(FindWitness, InsufficientBitsAreReported) {
  auto src = SequenceSource::from_word(Word("111"));
  EXPECT_THROW(find_witness(RecurrenceQuery<ClopenSet>{src, ones(), 2, 5}), InsufficientData);
  EXPECT_THROW(find_witness(RecurrenceQuery<ClopenSet>{src, ones(), 0, 5}), OutOfRange);
}

TEST(Profile, Examples) {
  for (auto e : recurrence_profile(SequenceSource::constant(true), ones(), 5, 20)) EXPECT_EQ(e.witness, 1u);
  auto alt = recurrence_profile(SequenceSource::eventually_periodic(Word(), Word("10")), ones(), 2, 20);
  EXPECT_EQ(alt[0].witness, 2u);
  EXPECT_EQ(alt[1].witness, 2u);
  for (auto e : recurrence_profile(SequenceSource::constant(false), ones(), 4, 20)) EXPECT_FALSE(e.witness);
}

TEST(Properties, MonotoneInTarget) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Word> small;
    std::vector<Word> big;
    for (std::uint64_t x = 0; x < 8; ++x) {
      const auto r = rng() % 3;
      if (r == 0) small.push_back(Word::from_bits(x, 3));
      if (r <= 1) big.push_back(Word::from_bits(x, 3));
    }
    ClopenSet f(3, small);
    ClopenSet g(3, big);
    auto src = SequenceSource::seeded(rng());
    auto rf = find_witness(RecurrenceQuery<ClopenSet>{src, f, 2, 40});
    if (rf.witness) {
      EXPECT_TRUE(is_witness(src, g, 2, *rf.witness));
      auto rg = find_witness(RecurrenceQuery<ClopenSet>{src, g, 2, 40});
      ASSERT_TRUE(rg.witness);
      EXPECT_LE(*rg.witness, *rf.witness);
    }
  }
}

TEST(Properties, ClosedTargetVerdictsAntiMonotoneInBudget) {
  StagedCoEnumeration b({{2, {Word("11")}}, {3, {Word("010")}}, {5, {Word("00000")}}});
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto src = SequenceSource::seeded(seed);
    for (std::size_t n = 1; n <= 10; ++n) {
      bool prev = true;
      for (std::size_t budget = 1; budget <= 6; ++budget) {
        bool now = is_witness(src, ClosedTarget(b, budget), 2, n);
        if (!prev) {
          EXPECT_FALSE(now) << "seed " << seed << " n " << n << " budget " << budget;
        }
        prev = now;
      }
    }
  }
  auto report = find_witness(RecurrenceQuery<ClosedTarget>{SequenceSource::seeded(1), ClosedTarget(b, 4), 1, 20});
  EXPECT_EQ(report.stage_budget, 4u);
}

TEST(Batch, FullSpaceAndDeterminism) {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  auto s = batch_statistics(std::span<const std::uint64_t>(seeds), ClopenSet::full(1), 3, 10);
  EXPECT_DOUBLE_EQ(s.fraction(), 1.0);
  EXPECT_EQ(s.histogram.size(), 1u);
  EXPECT_EQ(s.histogram.at(1), 5u);

  std::vector<std::uint64_t> one{77};
  auto a = batch_statistics(std::span<const std::uint64_t>(one), ones(), 2, 50);
  auto b = batch_statistics(std::span<const std::uint64_t>(one), ones(), 2, 50);
  EXPECT_EQ(a.rows.size(), 1u);
  EXPECT_EQ(a.rows[0].witness, b.rows[0].witness);
  EXPECT_EQ(a.histogram, b.histogram);
  std::vector<std::uint64_t> none;
  EXPECT_THROW(batch_statistics(std::span<const std::uint64_t>(none), ones(), 2, 50), OutOfRange);
}

TEST(Batch, PerNHitFrequencyMatchesPowerOfP) {
  // For a fixed n the event "bits n and 2n are both 1" has probability 1/4.
  const std::size_t seeds = 4000;
  std::size_t hits = 0;
  for (std::uint64_t s = 0; s < seeds; ++s) hits += is_witness(SequenceSource::seeded(s), ones(), 2, 5) ? 1 : 0;
  const double freq = static_cast<double>(hits) / seeds;
  const double se = std::sqrt(0.25 * 0.75 / seeds);
  EXPECT_NEAR(freq, 0.25, 4 * se);

  std::vector<std::uint64_t> list(1000);
  for (std::size_t i = 0; i < list.size(); ++i) list[i] = i;
  auto summary = batch_statistics(std::span<const std::uint64_t>(list), ones(), 2, 50);
  EXPECT_GT(summary.fraction(), 0.999);
}
