#include <gtest/gtest.h>

#include <json.hpp>

#include "fsq/context_io.hpp"
#include "fsq/error.hpp"
#include "support/test_support.hpp"

namespace fsq {
namespace {

using nlohmann::json;

json minimal()
{
    return json::parse(R"({
      "relation": "R",
      "threshold": 0.5,
      "attributes": [{"name": "A", "labels": ["x"]}],
      "tuples": [{"id": "g1", "memberships": {"A": {"x": 0.2}}},
                 {"id": "g2", "memberships": {"A": {"x": 0.9}}}]
    })");
}

std::string location_of(const json& doc)
{
    try {
        (void)context_from_json(doc);
    } catch (const ValidationError& e) {
        return e.location();
    }
    return "<no error>";
}

TEST(ContextJson, MinimalDocument)
{
    auto ctx = context_from_json(minimal());
    EXPECT_EQ(ctx.object_count(), 2u);
    EXPECT_EQ(ctx.relation(), "R");
    EXPECT_EQ(ctx.degree(1, 0), 0.9);
}

TEST(ContextJson, EmployeeFixtureShape)
{
    auto ctx = test::employees();
    EXPECT_EQ(ctx.relation(), "Employees");
    EXPECT_EQ(ctx.threshold(), 0.4);
    EXPECT_EQ(ctx.object_count(), 6u);
    EXPECT_EQ(ctx.vocabulary().attribute_count(), 3u);
    EXPECT_EQ(ctx.label_count(), 8u);
    EXPECT_EQ(ctx.degree(ctx.object_index("t6"), ctx.label_index({"Income", "CI"})), 0.8);
    EXPECT_EQ(ctx.degree(ctx.object_index("t3"), ctx.label_index({"Income", "PI"})), 0.0);
}

TEST(ContextJson, RoundTrip)
{
    auto ctx = test::employees();
    EXPECT_EQ(context_from_json(context_to_json(ctx)), ctx);
    auto reparsed = context_from_json(json::parse(context_to_json(ctx).dump()));
    EXPECT_EQ(reparsed, ctx);
}

TEST(ContextJson, DefaultsWhenOptionalFieldsMissing)
{
    auto doc = minimal();
    doc.erase("relation");
    doc.erase("threshold");
    auto ctx = context_from_json(doc);
    EXPECT_EQ(ctx.threshold(), 0.5);
    EXPECT_EQ(ctx.relation(), "");
}

TEST(ContextJson, ErrorsNameTheOffendingCell)
{
    auto doc = minimal();
    doc["tuples"][1]["memberships"]["A"]["x"] = 1.2;
    EXPECT_EQ(location_of(doc), "tuples[1].memberships.A.x");

    doc = minimal();
    doc["tuples"][0]["memberships"]["A"]["z"] = 0.1;
    EXPECT_EQ(location_of(doc), "tuples[0].memberships.A.z");

    doc = minimal();
    doc["tuples"][0]["memberships"]["B"] = json::object();
    EXPECT_EQ(location_of(doc), "tuples[0].memberships.B");

    doc = minimal();
    doc.erase("tuples");
    EXPECT_NE(location_of(doc), "<no error>");

    doc = minimal();
    doc["tuples"][1]["id"] = "g1";
    EXPECT_NE(location_of(doc), "<no error>");

    doc = minimal();
    doc["threshold"] = 2;
    EXPECT_EQ(location_of(doc), "threshold");
}

TEST(ContextJson, LabelObjectsCarryAliases)
{
    auto doc = minimal();
    doc["attributes"][0]["labels"] = json::parse(R"([{"name": "x", "aliases": ["ex"]}])");
    doc["tuples"][0]["memberships"]["A"] = json::parse(R"({"ex": 0.3})");
    auto ctx = context_from_json(doc);
    EXPECT_EQ(ctx.degree(0, 0), 0.3);
}

TEST(ContextTable, ParsesDocumentsWithBlankCells)
{
    auto ctx = test::documents();
    ASSERT_EQ(ctx.object_count(), 3u);
    ASSERT_EQ(ctx.label_count(), 3u);
    EXPECT_EQ(ctx.degree(0, 2), 0.61);
    EXPECT_EQ(ctx.degree(0, 1), 0.0);
    EXPECT_EQ(ctx.degree(1, 1), 0.85);
    EXPECT_EQ(ctx.degree(2, 2), 0.87);
}

TEST(ContextTable, ErrorsNameLineAndColumn)
{
    try {
        (void)context_from_table("id, A.x\ng1, 0.2\ng2, 1.2\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.location(), "line 3, column A.x");
    }
    EXPECT_THROW((void)context_from_table("name, A.x\ng1, 0.2\n"), ValidationError);
    EXPECT_THROW((void)context_from_table("id, A.x\ng1, abc\n"), ValidationError);
    EXPECT_THROW((void)context_from_table("id, Ax\ng1, 0.1\n"), ValidationError);
    EXPECT_THROW((void)context_from_table(""), ValidationError);
}

TEST(LoadContext, SniffsFormat)
{
    EXPECT_EQ(load_context(minimal().dump()).object_count(), 2u);
    EXPECT_EQ(load_context("id, A.x, A.y\ng, 0.1, 0.2\n").label_count(), 2u);
    EXPECT_THROW((void)load_context("{ not json"), ValidationError);
}

TEST(LoadContext, MissingFileIsValidationError)
{
    EXPECT_THROW((void)load_context_file(test::fixture("does-not-exist.json")), ValidationError);
}

}  // namespace
}  // namespace fsq
