#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "medlist/rrf.hpp"
#include "support/fixture.hpp"

using namespace medlist::rrf;

namespace {

std::string concept_line(const std::string& cui, const std::string& aui, const std::string& tty, const std::string& str,
                         const std::string& suppress = "N") {
    return fixture::concept_line({cui, aui, "RXNORM", tty, str, suppress}, SourceDialect::rxnorm_native);
}

}  // namespace

TEST(ParseConcepts, PositionalFields) {
    std::istringstream in(concept_line("352393", "1000002", "BN", "Abilify") + "\n");
    auto r = parse_concepts(in, SourceDialect::rxnorm_native);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].tty, "BN");
    EXPECT_EQ(r.rows[0].str, "Abilify");
    EXPECT_EQ(r.rows[0].rxcui, "352393");
    EXPECT_EQ(r.rows[0].rxaui, "1000002");
    EXPECT_EQ(r.rows[0].sab, "RXNORM");
    EXPECT_EQ(r.rows[0].suppress, "N");
    EXPECT_TRUE(r.report.malformed.empty());
}

TEST(ParseConcepts, DialectsYieldIdenticalRows) {
    auto table = fixture::rxnorm_fixture();
    auto umls = fixture::render(table, SourceDialect::umls);
    auto native = fixture::render(table, SourceDialect::rxnorm_native);
    ASSERT_NE(umls.concepts, native.concepts);

    std::istringstream a(umls.concepts), b(native.concepts);
    auto ra = parse_concepts(a, SourceDialect::umls);
    auto rb = parse_concepts(b, SourceDialect::rxnorm_native);
    EXPECT_TRUE(ra.report.malformed.empty());
    EXPECT_EQ(ra.rows, rb.rows);
    EXPECT_EQ(ra.rows.size(), table.atoms.size());

    std::istringstream c(umls.relationships), d(native.relationships);
    EXPECT_EQ(parse_relationships(c, SourceDialect::umls).rows, parse_relationships(d, SourceDialect::rxnorm_native).rows);
    std::istringstream e(umls.attributes), f(native.attributes);
    EXPECT_EQ(parse_attributes(e, SourceDialect::umls).rows, parse_attributes(f, SourceDialect::rxnorm_native).rows);
}

TEST(ParseConcepts, WrongDialectRejectsEveryLine) {
    auto umls = fixture::render(fixture::rxnorm_fixture(), SourceDialect::umls);
    std::istringstream in(umls.concepts);
    auto r = parse_concepts(in, SourceDialect::rxnorm_native);
    EXPECT_TRUE(r.rows.empty());
    EXPECT_EQ(r.report.malformed.size(), r.report.lines);
    EXPECT_NE(r.report.malformed[0].reason.find("not a RXNORM identifier"), std::string::npos);
}

TEST(ParseConcepts, ShortLineIsReportedAndParsingContinues) {
    std::string good = concept_line("1", "2", "IN", "aspirin");
    std::istringstream in(good + "\n1|ENG|P|\n" + good + "\n");
    auto r = parse_concepts(in, SourceDialect::rxnorm_native);
    EXPECT_EQ(r.rows.size(), 2u);
    ASSERT_EQ(r.report.malformed.size(), 1u);
    EXPECT_EQ(r.report.malformed[0].line_number, 2u);
    EXPECT_NE(r.report.malformed[0].reason.find("expected 18 fields"), std::string::npos);
}

TEST(ParseConcepts, ContractViolations) {
    std::vector<std::string> bad{
        concept_line("", "2", "IN", "aspirin"),                  // empty rxcui
        concept_line("1", "", "IN", "aspirin"),                  // empty rxaui
        concept_line("1", "2", "IN", "   "),                     // blank term
        concept_line("1", "2", "IN", "aspirin", "NO"),           // two-char suppress flag
        concept_line("1", "2", "IN", "caf\xE9"),                 // latin-1
        concept_line("1", "2", "IN", "aspirin").substr(0, 40),   // no trailing pipe
        "",
    };
    std::string body;
    for (const auto& b : bad) body += b + "\n";
    std::istringstream in(body);
    auto r = parse_concepts(in, SourceDialect::rxnorm_native);
    EXPECT_TRUE(r.rows.empty());
    EXPECT_EQ(r.report.malformed.size(), bad.size());
}

TEST(ParseConcepts, HandlesCrlfAndBom) {
    std::istringstream in("\xEF\xBB\xBF" + concept_line("1", "2", "IN", "aspirin") + "\r\n");
    auto r = parse_concepts(in, SourceDialect::rxnorm_native);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].str, "aspirin");
}

TEST(ParseRelationships, RelaIsNormalized) {
    auto line = [](const std::string& rela) {
        return fixture::relationship_line({"1", "11", "2", "22", rela}, SourceDialect::rxnorm_native) + "\n";
    };
    std::istringstream in(line("has_ingredient") + line("TRADENAME_OF") + line("tradenname_of"));
    auto r = parse_relationships(in, SourceDialect::rxnorm_native);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].rela, "has_ingredient");
    EXPECT_EQ(r.rows[1].rela, "tradename_of");
    EXPECT_EQ(r.rows[2].rela, "tradename_of");
    EXPECT_EQ(r.rows[0].rxcui1, "1");
    EXPECT_EQ(r.rows[0].rxaui2, "22");
}

TEST(ParseRelationships, EmptyFile) {
    std::istringstream in("");
    auto r = parse_relationships(in, SourceDialect::umls);
    EXPECT_TRUE(r.rows.empty());
    EXPECT_TRUE(r.report.malformed.empty());
    EXPECT_EQ(r.report.lines, 0u);
}

TEST(ParseRelationships, ConceptLevelEndpointsAllowed) {
    std::istringstream in(fixture::relationship_line({"1", "", "2", "", "has_ingredient"}, SourceDialect::umls) + "\n");
    auto r = parse_relationships(in, SourceDialect::umls);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].rxaui1, "");
    EXPECT_EQ(r.rows[0].rxcui2, "2");
}

TEST(ParseAttributes, StrengthRow) {
    std::istringstream in(fixture::attribute_line({"400001", "2000001", "RXN_STRENGTH", "2 MG"}, SourceDialect::rxnorm_native) +
                          "\n" + fixture::attribute_line({"400001", "2000001", "NDC", "0059"}, SourceDialect::rxnorm_native) +
                          "\n");
    auto r = parse_attributes(in, SourceDialect::rxnorm_native);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.rows[0].atn, "RXN_STRENGTH");
    EXPECT_EQ(r.rows[0].atv, "2 MG");
    EXPECT_EQ(r.rows[1].atn, "NDC");
}

TEST(ParseAttributes, AtnIsCaseSignificant) {
    std::istringstream in(fixture::attribute_line({"1", "2", "rxn_strength", "2 MG"}, SourceDialect::rxnorm_native) + "\n");
    EXPECT_EQ(parse_attributes(in, SourceDialect::rxnorm_native).rows.at(0).atn, "rxn_strength");
}

TEST(ParseAttributes, EmbeddedPipeIsOutOfContract) {
    std::istringstream in(fixture::attribute_line({"1", "2", "RXN_STRENGTH", "\"2|MG\""}, SourceDialect::rxnorm_native) + "\n");
    auto r = parse_attributes(in, SourceDialect::rxnorm_native);
    EXPECT_TRUE(r.rows.empty());
    ASSERT_EQ(r.report.malformed.size(), 1u);
    EXPECT_EQ(r.report.malformed[0].line_number, 1u);
}

TEST(ParseAttributes, EmptyAtnRejected) {
    std::istringstream in(fixture::attribute_line({"1", "2", "", "x"}, SourceDialect::rxnorm_native) + "\n");
    EXPECT_EQ(parse_attributes(in, SourceDialect::rxnorm_native).report.malformed.size(), 1u);
}

TEST(Parse, StreamFailureThrows) {
    std::istringstream in(concept_line("1", "2", "IN", "x") + "\n");
    in.setstate(std::ios::badbit);
    EXPECT_THROW(parse_concepts(in, SourceDialect::rxnorm_native), medlist::IoError);
}

// Property checks over generated content.

namespace {

std::string random_token(std::mt19937& rng, bool allow_empty) {
    static const std::string alphabet = "abcXYZ 0123456789-/.[]\xC3\xA9";
    std::uniform_int_distribution<int> len(allow_empty ? 0 : 1, 12);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s;
    int n = len(rng);
    while (static_cast<int>(s.size()) < n) {
        char c = alphabet[pick(rng)];
        if (static_cast<unsigned char>(c) == 0xC3 || static_cast<unsigned char>(c) == 0xA9) {
            s += "\xC3\xA9";
        } else {
            s += c;
        }
    }
    if (!allow_empty && medlist::text::trim(s).empty()) s = "x" + s;
    return s;
}

std::string random_id(std::mt19937& rng) { return std::to_string(std::uniform_int_distribution<int>(0, 9999999)(rng)); }

}  // namespace

TEST(ParseProperty, RoundTripThroughBothDialects) {
    std::mt19937 rng(42);
    for (auto dialect : {SourceDialect::umls, SourceDialect::rxnorm_native}) {
        std::vector<ConceptRow> concepts;
        std::vector<RelationshipRow> rels;
        std::vector<AttributeRow> attrs;
        for (int i = 0; i < 300; ++i) {
            concepts.push_back({random_id(rng), random_id(rng), random_token(rng, true), random_token(rng, true),
                                random_token(rng, false), i % 3 ? "N" : "O"});
            rels.push_back({random_id(rng), i % 4 ? random_id(rng) : "", random_id(rng), i % 5 ? random_id(rng) : "",
                            normalize_rela(random_token(rng, true))});
            attrs.push_back({random_id(rng), i % 2 ? random_id(rng) : "", random_token(rng, false), random_token(rng, true)});
        }
        std::string c, r, a;
        for (const auto& row : concepts) c += to_rrf_line(row, dialect) + "\n";
        for (const auto& row : rels) r += to_rrf_line(row, dialect) + "\n";
        for (const auto& row : attrs) a += to_rrf_line(row, dialect) + "\n";
        std::istringstream ci(c), ri(r), ai(a);
        EXPECT_EQ(parse_concepts(ci, dialect).rows, concepts);
        EXPECT_EQ(parse_relationships(ri, dialect).rows, rels);
        EXPECT_EQ(parse_attributes(ai, dialect).rows, attrs);
    }
}

TEST(ParseProperty, ReportAccountsForEveryLine) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> kind(0, 5), pipes(0, 25);
    for (int round = 0; round < 50; ++round) {
        std::string body;
        std::size_t lines = std::uniform_int_distribution<int>(0, 40)(rng);
        for (std::size_t i = 0; i < lines; ++i) {
            switch (kind(rng)) {
                case 0: body += concept_line(random_id(rng), random_id(rng), "IN", random_token(rng, false)); break;
                case 1: body += std::string(static_cast<std::size_t>(pipes(rng)), '|'); break;
                case 2: body += random_token(rng, true); break;
                case 3: body += "C12|" + random_token(rng, true) + "|"; break;
                case 4: body += concept_line(random_id(rng), random_id(rng), "IN", random_token(rng, false)) + "\r"; break;
                default: body += "\xFF\xFE|"; break;
            }
            body += "\n";
        }
        std::istringstream in(body);
        auto r = parse_concepts(in, SourceDialect::rxnorm_native);
        EXPECT_EQ(r.report.lines, lines);
        EXPECT_EQ(r.rows.size() + r.report.malformed.size(), lines);
    }
}
