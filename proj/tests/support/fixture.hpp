#pragma once

// Hand-built RxNorm fixture covering the Abilify and Zoloft modal tables plus
// the suppression, tradename and strength edge cases. The same source table
// is rendered in both dialects; line building here is independent of the
// library's encoder.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "medlist/rrf.hpp"

namespace fixture {

struct Atom {
    std::string cui, aui, sab, tty, str, suppress;
};

struct Link {  // reads "aui2 rela aui1"
    std::string cui1, aui1, cui2, aui2, rela;
};

struct Attr {
    std::string cui, aui, atn, atv;
};

struct SourceTable {
    std::vector<Atom> atoms;
    std::vector<Link> links;
    std::vector<Attr> attrs;
};

inline SourceTable rxnorm_fixture() {
    SourceTable t;
    auto atom = [&](std::string cui, std::string aui, std::string tty, std::string str, std::string suppress = "N",
                    std::string sab = "RXNORM") {
        t.atoms.push_back({cui, aui, sab, tty, str, suppress});
    };
    auto form = [&](std::string cui, std::string aui, std::string tty, std::string str, std::string strength,
                    const std::string& name_cui, const std::string& name_aui, std::string suppress = "N") {
        atom(cui, aui, tty, str, suppress);
        t.attrs.push_back({cui, aui, "RXN_STRENGTH", strength});
        t.links.push_back({name_cui, name_aui, cui, aui, "has_ingredient"});
    };

    // Names.
    atom("89013", "1000001", "IN", "aripiprazole");
    atom("352393", "1000002", "BN", "Abilify");
    atom("352400", "1000003", "BD", "Brand of aripiprazole");
    atom("36437", "1000011", "IN", "Sertraline");
    atom("82405", "1000012", "BN", "Zoloft");
    atom("4493", "1000021", "IN", "fluoxetine");
    atom("58827", "1000022", "BN", "Prozac");
    atom("39786", "1000031", "IN", "venlafaxine");
    atom("161", "1000041", "IN", "acetaminophen");
    atom("3498", "1000042", "IN", "diphenhydramine");
    atom("218000", "1000043", "BN", "Tylenol PM");
    atom("8919", "1000051", "IN", "pyrethrins");
    atom("900001", "1000052", "BN", "Flea Shampoo");

    // Abilify branded components, deliberately out of table order.
    form("400003", "2000003", "SBDC", "aripiprazole 10 MG [Abilify]", "10 MG", "352393", "1000002");
    form("400007", "2000007", "SBDC", "aripiprazole 1 MG/ML [Abilify]", "1 MG/ML", "352393", "1000002");
    form("400001", "2000001", "SBDC", "aripiprazole 2 MG [Abilify]", "2 MG", "352393", "1000002");
    form("400006", "2000006", "SBDC", "aripiprazole 30 MG [Abilify]", "30 MG", "352393", "1000002");
    form("400002", "2000002", "SBDC", "aripiprazole 5 MG [Abilify]", "5 MG", "352393", "1000002");
    form("400008", "2000008", "SBDC", "aripiprazole 7.5 MG/ML [Abilify]", "7.5 MG/ML", "352393", "1000002");
    form("400005", "2000005", "SBDC", "aripiprazole 20 MG [Abilify]", "20 MG", "352393", "1000002");
    form("400004", "2000004", "SBDC", "aripiprazole 15 MG [Abilify]", "15 MG", "352393", "1000002");
    form("400009", "2000009", "SBDC", "aripiprazole 25 MG [Abilify]", "25 MG", "352393", "1000002", "O");
    form("400020", "2000020", "SBDC", "aripiprazole 15 MG [Brand of aripiprazole]", "15 MG", "352400", "1000003");
    // Same concept as a form, from another source vocabulary.
    atom("400001", "3000001", "DP", "ABILIFY 2 MG TABLET", "N", "MTHSPL");

    form("410001", "2100001", "SCDC", "aripiprazole 5 MG", "5 MG", "89013", "1000001");
    form("410002", "2100002", "SCDC", "aripiprazole 10 MG", "10 MG", "89013", "1000001");

    // Zoloft branded components.
    form("420003", "2200003", "SBDC", "Sertraline 100 MG [Zoloft]", "100 MG", "82405", "1000012");
    form("420004", "2200004", "SBDC", "Sertraline 20 MG/ML [Zoloft]", "20 MG/ML", "82405", "1000012");
    form("420001", "2200001", "SBDC", "Sertraline 25 MG [Zoloft]", "25 MG", "82405", "1000012");
    form("420002", "2200002", "SBDC", "Sertraline 50 MG [Zoloft]", "50 MG", "82405", "1000012");

    form("430001", "2300001", "SCDC", "Sertraline 25 MG", "25 MG", "36437", "1000011");
    form("430002", "2300002", "SCDC", "Sertraline 50.0 MG", "50.0 MG", "36437", "1000011");
    form("430003", "2300003", "SCDC", "Sertraline Oral Concentrate", "MG", "36437", "1000011");

    form("440001", "2400001", "SBDC", "fluoxetine 20 MG [Prozac]", "20 MG", "58827", "1000022");
    form("440002", "2400002", "SBDC", "fluoxetine 4 MG/ML [Prozac]", "4 mg/ml", "58827", "1000022");
    form("450001", "2500001", "SCDC", "fluoxetine 10 MG", "10 MG", "4493", "1000021");
    form("450002", "2500002", "SCDC", "fluoxetine 20 MG", "20 MG", "4493", "1000021");

    form("460001", "2600001", "SCDC", "venlafaxine 37.5 MG", "37.5 MG", "39786", "1000031");
    form("460002", "2600002", "SCDC", "venlafaxine 75 MG", "75 MG", "39786", "1000031");

    form("470001", "2700001", "SBDC", "acetaminophen 500 MG [Tylenol PM]", "500 MG", "218000", "1000043");
    form("470002", "2700002", "SBDC", "diphenhydramine 25 MG [Tylenol PM]", "25 MG", "218000", "1000043");
    form("480001", "2800001", "SCDC", "acetaminophen 325 MG", "325 MG", "161", "1000041");

    form("490001", "2900001", "SBDC", "pyrethrins 0.15 % [Flea Shampoo]", "0.15 %", "900001", "1000052");
    form("490002", "2900002", "SCDC", "pyrethrins 0.33 MG/ML", "0.33 MG/ML", "8919", "1000051");

    // Tradenames: brand (aui2) tradename_of generic (aui1). Tylenol PM has two generics.
    t.links.push_back({"89013", "1000001", "352393", "1000002", "tradenname_of"});
    t.links.push_back({"36437", "1000011", "82405", "1000012", "TRADENAME_OF"});
    t.links.push_back({"4493", "1000021", "58827", "1000022", "tradename_of"});
    t.links.push_back({"161", "1000041", "218000", "1000043", "tradename_of"});
    t.links.push_back({"3498", "1000042", "218000", "1000043", "tradename_of"});
    // Inverse direction and unrelated relations are ignored.
    t.links.push_back({"352393", "1000002", "89013", "1000001", "has_tradename"});
    t.links.push_back({"410001", "2100001", "400002", "2000002", "tradename_of"});

    t.attrs.push_back({"410001", "2100001", "RXN_AVAILABLE_STRENGTH", "5 MG"});
    t.attrs.push_back({"89013", "", "RXN_HUMAN_DRUG", "US"});
    return t;
}

inline std::string id(const std::string& canonical, medlist::rrf::SourceDialect d, char prefix) {
    if (d == medlist::rrf::SourceDialect::rxnorm_native || canonical.empty()) return canonical;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%07lu", prefix, std::stoul(canonical));
    return buf;
}

inline std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (const auto& f : fields) out += f + "|";
    return out;
}

inline std::string concept_line(const Atom& a, medlist::rrf::SourceDialect d) {
    // CUI|LAT|TS|LUI|STT|SUI|ISPREF|AUI|SAUI|SCUI|SDUI|SAB|TTY|CODE|STR|SRL|SUPPRESS|CVF
    return join({id(a.cui, d, 'C'), "ENG", "", "", "", "", "", id(a.aui, d, 'A'), "", "", "", a.sab, a.tty, a.cui,
                 a.str, "", a.suppress, "4096"});
}

inline std::string relationship_line(const Link& l, medlist::rrf::SourceDialect d) {
    // CUI1|AUI1|STYPE1|REL|CUI2|AUI2|STYPE2|RELA|RUI|SRUI|SAB|SL|RG|DIR|SUPPRESS|CVF
    return join({id(l.cui1, d, 'C'), id(l.aui1, d, 'A'), "AUI", "RO", id(l.cui2, d, 'C'), id(l.aui2, d, 'A'), "AUI",
                 l.rela, "", "", "RXNORM", "RXNORM", "", "", "N", ""});
}

inline std::string attribute_line(const Attr& a, medlist::rrf::SourceDialect d) {
    // CUI|LUI|SUI|AUI|STYPE|CODE|ATUI|SATUI|ATN|SAB|ATV|SUPPRESS|CVF
    return join({id(a.cui, d, 'C'), "", "", id(a.aui, d, 'A'), a.aui.empty() ? "CUI" : "AUI", a.cui, "", "", a.atn,
                 "RXNORM", a.atv, "N", "4096"});
}

struct Rendered {
    std::string concepts, relationships, attributes;
};

inline Rendered render(const SourceTable& t, medlist::rrf::SourceDialect d) {
    Rendered r;
    for (const auto& a : t.atoms) r.concepts += concept_line(a, d) + "\n";
    for (const auto& l : t.links) r.relationships += relationship_line(l, d) + "\n";
    for (const auto& a : t.attrs) r.attributes += attribute_line(a, d) + "\n";
    return r;
}

/// File names per dialect: MRCONSO/MRREL/MRSAT or RXNCONSO/RXNREL/RXNSAT.
inline std::vector<std::filesystem::path> write(const SourceTable& t, medlist::rrf::SourceDialect d,
                                                const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    bool umls = d == medlist::rrf::SourceDialect::umls;
    auto r = render(t, d);
    std::vector<std::filesystem::path> paths{dir / (umls ? "MRCONSO.RRF" : "RXNCONSO.RRF"),
                                             dir / (umls ? "MRREL.RRF" : "RXNREL.RRF"),
                                             dir / (umls ? "MRSAT.RRF" : "RXNSAT.RRF")};
    const std::string* bodies[] = {&r.concepts, &r.relationships, &r.attributes};
    for (int i = 0; i < 3; ++i) std::ofstream(paths[i], std::ios::binary) << *bodies[i];
    return paths;
}

/// The Abilify and Zoloft modal rows as printed: common_form, dose_amt, dose_units.
struct TableRow {
    std::string common_form, dose_amt, dose_units;
};

inline std::vector<TableRow> abilify_table() {
    return {{"aripiprazole 2 MG [Abilify]", "2", "MG"},         {"aripiprazole 5 MG [Abilify]", "5", "MG"},
            {"aripiprazole 10 MG [Abilify]", "10", "MG"},       {"aripiprazole 15 MG [Abilify]", "15", "MG"},
            {"aripiprazole 20 MG [Abilify]", "20", "MG"},       {"aripiprazole 30 MG [Abilify]", "30", "MG"},
            {"aripiprazole 1 MG/ML [Abilify]", "1", "MG/ML"},   {"aripiprazole 7.5 MG/ML [Abilify]", "7.5", "MG/ML"}};
}

inline std::vector<TableRow> zoloft_table() {
    return {{"Sertraline 25 MG [Zoloft]", "25", "MG"},
            {"Sertraline 50 MG [Zoloft]", "50", "MG"},
            {"Sertraline 100 MG [Zoloft]", "100", "MG"},
            {"Sertraline 20 MG/ML [Zoloft]", "20", "MG/ML"}};
}

}  // namespace fixture
