#include <gtest/gtest.h>

#include <sstream>

#include "dust/lake_model.hpp"

using namespace dust;
using namespace dust::lake;

namespace {

Table parse(const std::string& csv, const std::string& name = "t") {
    std::istringstream in(csv);
    return parse_table(in, name, Role::lake);
}

}  // namespace

TEST(LakeModel, ParsesHeaderAndRows) {
    auto t = parse("Park Name,City\nRiver Park,Fresno\nChippewa Park,\"Brandon, MN\"\n");
    ASSERT_EQ(t.num_columns(), 2u);
    ASSERT_EQ(t.num_rows(), 2u);
    EXPECT_EQ(t.headers[0], "Park Name");
    EXPECT_EQ(*t.at(1, 1), "Brandon, MN");
}

TEST(LakeModel, HeadersAreTrimmedAndMissingOnesNamed) {
    auto t = parse("  Park Name ,,City\na,b,c\n");
    EXPECT_EQ(t.headers, (std::vector<std::string>{"Park Name", "col1", "City"}));
}

TEST(LakeModel, DuplicateHeadersUnderCaseFoldingAreRejected) {
    EXPECT_THROW(parse("City, city \nx,y\n"), DuplicateHeaderError);
}

TEST(LakeModel, NullSpellingsBecomeNull) {
    auto t = parse("a,b,c,d,e,f\n,nan,NaN,null,NULL,0\n");
    for (std::size_t j = 0; j < 5; ++j) EXPECT_FALSE(t.at(0, j).has_value()) << j;
    EXPECT_EQ(*t.at(0, 5), "0");
}

TEST(LakeModel, RaggedRowIsRejectedNotPadded) {
    EXPECT_THROW(parse("a,b\n1,2\n3\n"), RaggedRowError);
    EXPECT_THROW(parse("a,b\n1,2,3\n"), RaggedRowError);
}

TEST(LakeModel, QuotedFieldsWithNewlinesAndQuotes) {
    auto t = parse("a,b\n\"line1\nline2\",\"say \"\"hi\"\"\"\n");
    ASSERT_EQ(t.num_rows(), 1u);
    EXPECT_EQ(*t.at(0, 0), "line1\nline2");
    EXPECT_EQ(*t.at(0, 1), "say \"hi\"");
}

TEST(LakeModel, ByteOrderMarkAndCrlfAreHandled) {
    auto t = parse("\xEF\xBB\xBFName,City\r\nA,B\r\n");
    EXPECT_EQ(t.headers[0], "Name");
    EXPECT_EQ(*t.at(0, 1), "B");
}

TEST(LakeModel, MissingHeaderRowIsAnError) { EXPECT_THROW(parse(""), IoError); }

TEST(LakeModel, AlternateDelimiter) {
    std::istringstream in("a;b\n1;2\n");
    auto t = parse_table(in, "t", Role::lake, ';');
    EXPECT_EQ(*t.at(0, 1), "2");
}

TEST(LakeModel, WriteThenParseRoundTrips) {
    Table t{"t", Role::lake, {"x", "y, z"}, {{Cell("a,b"), std::nullopt}, {Cell("q\"uote"), Cell("line\nbreak")}}};
    std::ostringstream out;
    write_table(out, t);
    auto back = parse(out.str());
    EXPECT_EQ(back.headers, t.headers);
    EXPECT_EQ(back.rows, t.rows);
}

TEST(LakeModel, DropNullColumnsKeepsOrder) {
    auto t = parse("a,b,c\n1,,x\n2,null,y\n");
    auto d = drop_null_columns(t);
    EXPECT_EQ(d.headers, (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(*d.at(1, 1), "y");
}

TEST(LakeModel, QueryNeedsThreeRows) {
    auto two = parse("a\n1\n2\n", "q");
    auto rej = validate_query(two);
    ASSERT_TRUE(rej.has_value());
    EXPECT_EQ(rej->row_count, 2u);
    EXPECT_FALSE(validate_query(parse("a\n1\n2\n3\n", "q")).has_value());
}

TEST(LakeModel, ColumnRefIdentityIgnoresHeader) {
    ColumnRef a{"t", 1, std::string("City")};
    ColumnRef b{"t", 1, std::nullopt};
    EXPECT_EQ(a, b);
    EXPECT_LT((ColumnRef{"s", 9, {}}), (ColumnRef{"t", 0, {}}));
}

TEST(LakeModel, TokenizeLowercasesAlphanumericRuns) {
    EXPECT_EQ(text::tokenize("Brandon, MN 773-0380"),
              (std::vector<std::string>{"brandon", "mn", "773", "0380"}));
    EXPECT_EQ(text::normalize("  USA "), "usa");
}
