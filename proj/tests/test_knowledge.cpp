#include <gtest/gtest.h>

#include "caussearch/error.hpp"
#include "caussearch/knowledge.hpp"
#include "caussearch/search.hpp"

using namespace caussearch;

namespace {

// Tier layout of the wearable-device example.
Knowledge wearable_tiers() {
    Knowledge k;
    for (auto n : {"age", "gender", "height", "weight"}) k.add_to_tier(0, n);
    for (auto n : {"steps", "hear_rate", "calories", "distance", "entropy", "device", "activity"}) k.add_to_tier(1, n);
    return k;
}

} // namespace

TEST(Knowledge, AddToTier) {
    Knowledge k;
    for (auto n : {"Frequency", "Attack", "Chord", "Velocity", "Displacement"}) k.add_to_tier(1, n);
    k.add_to_tier(2, "Pressure");
    EXPECT_EQ(k.tiers().size(), 3u);
    EXPECT_TRUE(k.tiers()[0].empty());
    EXPECT_EQ(*k.tier_of("Pressure"), 2u);
    k.add_to_tier(2, "Pressure");
    EXPECT_EQ(k.tiers()[2].size(), 1u);
    EXPECT_THROW(k.add_to_tier(1, "Pressure"), ConfigError);

    Knowledge five;
    five.add_to_tier(0, "a").add_to_tier(5, "b");
    EXPECT_EQ(five.tiers().size(), 6u);
    for (std::size_t t = 1; t < 5; ++t) EXPECT_TRUE(five.tiers()[t].empty());
}

TEST(Knowledge, IsForbiddenByTiers) {
    auto k = wearable_tiers();
    EXPECT_TRUE(k.is_forbidden("steps", "age"));
    EXPECT_FALSE(k.is_forbidden("age", "steps"));
    EXPECT_FALSE(k.is_forbidden("age", "gender"));
    k.set_tier_forbidden_within(0, true);
    EXPECT_TRUE(k.is_forbidden("age", "gender"));
    EXPECT_TRUE(k.is_forbidden("gender", "age"));
    EXPECT_FALSE(k.is_forbidden("steps", "device"));
    k.set_tier_forbidden_within(0, false);
    EXPECT_FALSE(k.is_forbidden("age", "gender"));
    EXPECT_FALSE(k.is_forbidden("nobody", "age"));
}

TEST(Knowledge, FlagOnEmptyTierHasNoEffect) {
    Knowledge k;
    k.set_tier_forbidden_within(3, true);
    k.add_to_tier(0, "a").add_to_tier(0, "b");
    EXPECT_FALSE(k.is_forbidden("a", "b"));
}

TEST(Knowledge, ExplicitPairs) {
    Knowledge k;
    k.add_forbidden("X", "Y").add_required("Y", "Z");
    EXPECT_TRUE(k.is_forbidden("X", "Y"));
    EXPECT_FALSE(k.is_forbidden("Y", "X"));
    EXPECT_TRUE(k.is_required("Y", "Z"));
}

TEST(Knowledge, Validate) {
    const std::vector<std::string> vars{"X", "Y", "Z"};
    Knowledge clean;
    clean.add_to_tier(0, "X").add_required("X", "Y");
    EXPECT_TRUE(clean.validate(vars).empty());

    Knowledge typo;
    typo.add_to_tier(0, "Xx");
    EXPECT_EQ(typo.validate(vars).size(), 1u);

    Knowledge conflict;
    conflict.add_required("X", "Y").add_forbidden("X", "Y");
    EXPECT_EQ(conflict.validate(vars).size(), 1u);

    Knowledge tier_conflict;
    tier_conflict.add_to_tier(0, "X").add_to_tier(1, "Y").add_required("Y", "X");
    EXPECT_EQ(tier_conflict.validate(vars).size(), 1u);

    Knowledge cycle;
    cycle.add_required("X", "Y").add_required("Y", "Z").add_required("Z", "X");
    EXPECT_EQ(cycle.validate(vars).size(), 1u);

    EXPECT_THROW(compile_knowledge(cycle, vars), ConfigError);
}

TEST(EdgeConstraints, TierArithmetic) {
    Knowledge k;
    k.add_to_tier(0, "A").add_to_tier(1, "B").add_to_tier(2, "C").add_required("A", "D");
    EdgeConstraints c(k, {"A", "B", "C", "D"});
    for (int from = 0; from < 3; ++from)
        for (int to = 0; to < 3; ++to)
            EXPECT_EQ(c.forbidden(from, to), from > to);
    EXPECT_EQ(c.tier(3), -1);
    EXPECT_TRUE(c.must_precede(0, 2));
    EXPECT_TRUE(c.must_precede(0, 3));
    EXPECT_FALSE(c.must_precede(3, 0));
    EXPECT_FALSE(c.must_precede(1, 3));
    EXPECT_TRUE(c.required_either(3, 0));
    EXPECT_FALSE(c.empty());
    EXPECT_TRUE(EdgeConstraints(4).empty());
}
