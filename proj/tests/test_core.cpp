#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "moea/benchmarks.hpp"
#include "moea/core.hpp"

using namespace moea;

TEST(Dominance, StrictImprovementDominates)
{
    EXPECT_TRUE(dominates(ObjectiveVector{1, 2}, ObjectiveVector{2, 3}));
}

TEST(Dominance, IdentityNeverDominates)
{
    EXPECT_FALSE(dominates(ObjectiveVector{1, 2}, ObjectiveVector{1, 2}));
}

TEST(Dominance, IncomparablePair)
{
    EXPECT_FALSE(dominates(ObjectiveVector{1, 3}, ObjectiveVector{3, 1}));
    EXPECT_FALSE(dominates(ObjectiveVector{3, 1}, ObjectiveVector{1, 3}));
}

TEST(Dominance, WeakDominanceExamples)
{
    EXPECT_TRUE(weakly_dominates(ObjectiveVector{1, 2}, ObjectiveVector{1, 2}));
    EXPECT_TRUE(weakly_dominates(ObjectiveVector{1, 2}, ObjectiveVector{2, 2}));
    EXPECT_FALSE(weakly_dominates(ObjectiveVector{2, 1}, ObjectiveVector{1, 2}));
}

TEST(Dominance, LengthMismatchIsContractViolation)
{
    EXPECT_THROW((void)dominates(ObjectiveVector{1, 2}, ObjectiveVector{1, 2, 3}), ContractViolation);
    EXPECT_THROW((void)weakly_dominates(ObjectiveVector{1}, ObjectiveVector{1, 2}), ContractViolation);
}

TEST(Dominance, OrderPropertiesOnRandomVectors)
{
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> cell(0, 3); // small lattice -> many ties
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + trial % 3;
        std::vector<ObjectiveVector> v(12, ObjectiveVector(m));
        for (auto& p : v)
            for (auto& x : p) x = cell(gen);
        for (const auto& a : v) {
            EXPECT_FALSE(dominates(a, a));
            EXPECT_TRUE(weakly_dominates(a, a));
            for (const auto& b : v) {
                if (dominates(a, b)) {
                    EXPECT_FALSE(dominates(b, a));
                    EXPECT_TRUE(weakly_dominates(a, b));
                }
                for (const auto& c : v) {
                    if (dominates(a, b) && dominates(b, c)) {
                        EXPECT_TRUE(dominates(a, c));
                    }
                    if (weakly_dominates(a, b) && weakly_dominates(b, c)) {
                        EXPECT_TRUE(weakly_dominates(a, c));
                    }
                }
            }
        }
    }
}

TEST(Evaluate, SchAnchors)
{
    const auto sch = make_problem(ProblemId::SCH);
    EXPECT_EQ(evaluate(sch, std::vector<double>{0.0}), (ObjectiveVector{0, 4}));
    EXPECT_EQ(evaluate(sch, std::vector<double>{2.0}), (ObjectiveVector{4, 0}));
}

TEST(Evaluate, Zdt1OnFront)
{
    const auto zdt1 = make_problem(ProblemId::ZDT1);
    std::vector<double> x(30, 0.0);
    x[0] = 0.25;
    const auto f = evaluate(zdt1, x);
    EXPECT_DOUBLE_EQ(f[0], 0.25);
    EXPECT_DOUBLE_EQ(f[1], 0.5);
}

TEST(Evaluate, OutOfBoundsAndWrongLength)
{
    const auto zdt1 = make_problem(ProblemId::ZDT1);
    std::vector<double> x(30, 0.0);
    x[3] = 1.5;
    EXPECT_THROW(evaluate(zdt1, x), ContractViolation);
    EXPECT_THROW(evaluate(zdt1, std::vector<double>(29, 0.0)), ContractViolation);
}

TEST(Evaluate, PureFunction)
{
    RngStream rng(3);
    for (auto id : kAllProblems) {
        const auto p = make_problem(id);
        std::vector<double> x(p.dimension());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(p.bounds[i].lower, p.bounds[i].upper);
        const auto a = evaluate(p, x);
        const auto b = evaluate(p, x);
        ASSERT_EQ(a.size(), 2u);
        EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * 2), 0) << p.name;
    }
}

TEST(RngStream, SameSeedSameSequence)
{
    RngStream a(99), b(99), c(100);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(RngStream, DrawRanges)
{
    RngStream rng(5);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto k = rng.uniform_index(7);
        ASSERT_LT(k, 7u);
        ++hist[k];
    }
    for (int h : hist) EXPECT_NEAR(h, 10000, 500);
    EXPECT_THROW(rng.uniform_index(0), ContractViolation);
}

TEST(RngStream, RunSeedsArePaired)
{
    EXPECT_EQ(RngStream::run_seed(1000, 0), 1000u);
    EXPECT_EQ(RngStream::run_seed(1000, 49), 1049u);
}

TEST(RngStream, SplitIsDeterministic)
{
    RngStream a(8), b(8);
    auto ca = a.split();
    auto cb = b.split();
    EXPECT_EQ(ca.next_u64(), cb.next_u64());
    EXPECT_EQ(a.next_u64(), b.next_u64());
}
