#include <gtest/gtest.h>

#include "fsq/engine.hpp"
#include "fsq/error.hpp"
#include "fsq/oracle.hpp"
#include "support/test_support.hpp"

namespace fsq {
namespace {

using Mapping = std::vector<std::pair<std::string, double>>;

constexpr const char* q1 = "Select 3 0.5 Income, ProfessionalBackground From Employees Where Age IN (Young);";
constexpr const char* q2 =
    "Select 3 0.3 ProfessionalBackground From Employees Where Income IN (Comfortable) AND Age IN (Young);";
constexpr const char* q3 =
    "Select 3 0.3 ProfessionalBackground From Employees Where Age IN (Young, Adult) And Income IN (Poor, Modest);";

Mapping mapping(const AlphaSummary& s)
{
    Mapping out;
    for (const auto& m : s.members) {
        out.emplace_back(m.id, m.concept_degree);
    }
    return out;
}

bool contains(const ResultList& r, const Mapping& expected)
{
    return std::any_of(r.summaries.begin(), r.summaries.end(), [&](const auto& s) { return mapping(s) == expected; });
}

ConceptId by_intent(const FuzzyFormalContext& ctx, const ConceptLattice& lat, std::vector<LabelRef> refs)
{
    auto wanted = make_label_set(ctx, refs);
    for (const auto& c : lat.concepts()) {
        if (c.intent == wanted) {
            return c.id;
        }
    }
    throw LookupError("no such concept");
}

class EngineTest : public ::testing::Test {
  protected:
    FuzzyFormalContext ctx = test::employees();
    ConceptLattice lat = build_lattice(ctx);
};

TEST_F(EngineTest, CorespClassifiesConcepts)
{
    auto q = compile_query(q1, ctx);
    auto ya = by_intent(ctx, lat, {{"Age", "YA"}});
    EXPECT_EQ(coresp(ctx, lat.at(ya), q), Correspondence::Exact);
    EXPECT_EQ(coresp(ctx, lat.top(), q), Correspondence::Indecision);
    auto t4 = by_intent(ctx, lat, {{"Age", "AA"}, {"Income", "PI"}, {"Income", "MI"}, {"ProfessionalBackground", "S"}});
    EXPECT_EQ(coresp(ctx, lat.at(t4), q), Correspondence::False);
    EXPECT_EQ(coresp(ctx, lat.bottom(), q), Correspondence::False);
    EXPECT_EQ(coresp(ctx, lat.at(ya), q, 0.8), Correspondence::False);
    EXPECT_EQ(to_string(Correspondence::Indecision), "Indecision");
}

TEST_F(EngineTest, AlphaSummaryOfYoung)
{
    auto ya = by_intent(ctx, lat, {{"Age", "YA"}});
    auto s = alpha_summary(lat, ya, 0.5);
    EXPECT_EQ(mapping(s), (Mapping{{"t1", 0.5}, {"t3", 0.7}, {"t5", 0.6}, {"t6", 0.5}}));
    EXPECT_EQ(s.sd, lat.satisfaction_degree(ya));
    EXPECT_EQ(s.level, lat.at(ya).level);
    EXPECT_EQ(s.intent, (std::vector<LabelRef>{{"Age", "YA"}}));
    EXPECT_TRUE(alpha_summary(lat, ya, 0.71).members.empty());
    EXPECT_THROW((void)alpha_summary(lat, 999, 0.5), LookupError);
}

TEST_F(EngineTest, FirstQueryFindsTheYoungSummary)
{
    auto q = compile_query(q1, ctx);
    auto all = fuzzy_k_query(ctx, lat, std::nullopt, q.alpha, q);
    EXPECT_TRUE(contains(all, {{"t1", 0.5}, {"t3", 0.7}, {"t5", 0.6}, {"t6", 0.5}}));
    for (const auto& s : all.summaries) {
        for (const auto& m : s.members) {
            ASSERT_TRUE(m.satisfaction);
            EXPECT_GE(*m.satisfaction, q.alpha);
            EXPECT_EQ(*m.satisfaction, tuple_satisfaction(ctx, m.object, q));
        }
        EXPECT_TRUE(s.output_description.contains("Income") || s.output_description.empty() ||
                    s.output_description.contains("ProfessionalBackground"));
        EXPECT_FALSE(s.output_description.contains("Age"));
    }
    auto top3 = fuzzy_k_query(ctx, lat, q);
    EXPECT_EQ(top3.k, std::optional<std::size_t>{3});
    EXPECT_EQ(top3.available, all.available);
    EXPECT_LE(top3.summaries.size(), 3u);
    for (std::size_t i = 0; i < top3.summaries.size(); ++i) {
        EXPECT_EQ(top3.summaries[i].concept_id, all.summaries[i].concept_id);
    }
}

TEST_F(EngineTest, SecondAndThirdQueriesSummaries)
{
    auto p2 = compile_query(q2, ctx);
    EXPECT_TRUE(contains(fuzzy_k_query(ctx, lat, std::nullopt, p2.alpha, p2), {{"t1", 0.4}}));
    auto p3 = compile_query(q3, ctx);
    auto r3 = fuzzy_k_query(ctx, lat, std::nullopt, p3.alpha, p3);
    EXPECT_TRUE(contains(r3, {{"t1", 0.5}, {"t2", 0.6}, {"t4", 0.4}}));
    // No closed extent at T=0.4 is exactly {t1, t2, t3}.
    EXPECT_FALSE(contains(r3, {{"t1", 0.5}, {"t2", 0.4}, {"t3", 0.7}}));
}

TEST_F(EngineTest, ResultsAreSortedAndDeduplicated)
{
    for (const char* text : {q1, q2, q3}) {
        auto q = compile_query(text, ctx);
        auto r = fuzzy_k_query(ctx, lat, std::nullopt, q.alpha, q);
        EXPECT_EQ(r.available, r.summaries.size());
        for (std::size_t i = 1; i < r.summaries.size(); ++i) {
            const auto& a = r.summaries[i - 1];
            const auto& b = r.summaries[i];
            EXPECT_TRUE(a.sd > b.sd || (a.sd == b.sd && (a.level < b.level ||
                                                         (a.level == b.level && a.concept_id < b.concept_id))));
        }
        std::set<Mapping> seen;
        for (const auto& s : r.summaries) {
            EXPECT_TRUE(seen.insert(mapping(s)).second);
            EXPECT_FALSE(s.members.empty());
        }
    }
}

TEST_F(EngineTest, PruningDoesNotChangeResults)
{
    for (const char* text : {q1, q2, q3}) {
        auto q = compile_query(text, ctx);
        auto pruned = fuzzy_k_query(ctx, lat, std::nullopt, q.alpha, q, {.prune_false = true});
        auto full = fuzzy_k_query(ctx, lat, std::nullopt, q.alpha, q, {.prune_false = false});
        ASSERT_EQ(pruned.summaries.size(), full.summaries.size());
        for (std::size_t i = 0; i < full.summaries.size(); ++i) {
            EXPECT_EQ(pruned.summaries[i].concept_id, full.summaries[i].concept_id);
        }
    }
}

TEST_F(EngineTest, PertinentResultFromInnerConcept)
{
    auto q = compile_query(q1, ctx);
    auto ya = by_intent(ctx, lat, {{"Age", "YA"}});
    auto r = pertinent_result(ctx, lat, ya, 0, q.alpha, q);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].concept_id, ya);
    EXPECT_EQ(r[0].level, 0u);
}

TEST_F(EngineTest, Preconditions)
{
    auto q = compile_query(q1, ctx);
    EXPECT_THROW((void)fuzzy_k_query(ctx, lat, std::size_t{0}, 0.5, q), PreconditionError);
    auto foreign = build_lattice(test::documents());
    EXPECT_THROW((void)fuzzy_k_query(ctx, foreign, q), ValidationError);
}

TEST_F(EngineTest, NothingMatchesGivesEmptyList)
{
    auto q = compile_query("SELECT 1.0 * FROM Employees WHERE Age IN (Young);", ctx);
    auto r = fuzzy_k_query(ctx, lat, q);
    EXPECT_TRUE(r.summaries.empty());
    EXPECT_EQ(r.available, 0u);
    EXPECT_NE(format_result_table(r).find("no summary"), std::string::npos);
}

TEST_F(EngineTest, JsonAndTableRendering)
{
    auto q = compile_query(q1, ctx);
    auto r = fuzzy_k_query(ctx, lat, q);
    auto doc = result_to_json(r);
    EXPECT_EQ(doc["alpha"], 0.5);
    EXPECT_EQ(doc["k"], 3);
    ASSERT_EQ(doc["results"].size(), r.summaries.size());
    EXPECT_EQ(doc["results"][0]["rank"], 1);
    EXPECT_TRUE(doc["results"][0]["members"][0].contains("satisfaction_degree"));
    auto table = format_result_table(r);
    EXPECT_EQ(table.rfind("rank", 0), 0u);
    EXPECT_NE(table.find("t1:0.5(0.5)"), std::string::npos);
}

}  // namespace
}  // namespace fsq
