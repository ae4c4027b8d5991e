#include "qdb/dbos.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace qdb;

namespace {

const Relation* find_relation(const Presentation& p, const std::string& fam, std::vector<int> idx) {
    for (auto& r : p.relations)
        if (r.family == fam && r.indices == idx) return &r;
    return nullptr;
}

std::string dump_images(const CaseImages& im) {
    std::string s;
    for (auto& [g, m] : im.img) s += g.str() + "\n" + dump_matrix(m.num) + m.den.str() + "\n";
    for (auto& [g, r] : im.solved_by) s += g.str() + " <- " + r + "\n";
    return s;
}

}  // namespace

TEST(Dbos, GenText) {
    for (auto t : {"e^2", "f_1", "c", "c^-1", "m+^1_2", "m-^3_1", "m+^12_3"}) EXPECT_EQ(Gen::parse(t).str(), t);
    EXPECT_EQ(Gen::parse("m+^1_2"), (Gen{'+', 0, 1}));
    EXPECT_THROW(Gen::parse("x^1"), ParseError);
    EXPECT_THROW(Gen::parse("m*^1_2"), ParseError);
}

TEST(Dbos, PresentationSize) {
    for (auto name : {"A1-A2", "A2-A3", "B2-B3", "A1-B2"}) {
        CaseMap cs = builtin_case(name, false);
        Presentation p = case_presentation(cs);
        EXPECT_EQ((long)p.relations.size(), Presentation::expected_count(cs.dim())) << name;
    }
    EXPECT_EQ(Presentation::expected_count(1), 14);
    // one-dimensional V: R = R' = 1
    Matrix one = Matrix::identity(1);
    Presentation p = build_presentation(one, one, Scalar::q(-1), 1, Scalar::q(1));
    EXPECT_EQ(p.relations.size(), 14u);
    for (auto& r : p.relations)
        for (auto* side : {&r.lhs, &r.rhs})
            for (auto& t : *side)
                for (auto& g : t.word) EXPECT_FALSE(structurally_zero(g));
}

TEST(Dbos, PresentationRejectsBadPairs) {
    Matrix r = closed_R_typeA(2);
    EXPECT_THROW(build_presentation(r, r, lambda_typeA(2), 2, Scalar::q(1)), PairConditionViolated);
    EXPECT_THROW(build_presentation(r, build_Rprime(r, RprimeFamily::TypeA), lambda_typeA(2), 3, Scalar::q(1)),
                 DimensionMismatch);
}

TEST(Dbos, TypeAVectorRelations) {
    CaseMap cs = builtin_case("A2-A3", false);
    Presentation p = case_presentation(cs);
    // e^2 e^3 = q^-1 e^3 e^2
    const Relation* r = find_relation(p, "ee", {2, 3});
    ASSERT_TRUE(r);
    ASSERT_EQ(r->rhs.size(), 1u);
    EXPECT_EQ(r->rhs[0].coef, Scalar::q(-1));
    EXPECT_EQ(r->rhs[0].word, (std::vector<Gen>{{'e', 2}, {'e', 1}}));
}

// [e^top, f_top] has lhs coefficient q_* - q_*^-1, q_* = q^{d_new}
TEST(Dbos, TopCommutatorNormalization) {
    for (auto [name, d] : std::vector<std::pair<std::string, mpq_class>>{
             {"A1-B2", 2}, {"A2-C3", 2}, {"A3-D4", 1}, {"A2-A3", 1}, {"B2-B3", 1}, {"C3-C4", 1}}) {
        CaseMap cs = builtin_case(name, false);
        Presentation p = case_presentation(cs);
        const Relation* r = find_relation(p, "ef", {cs.dim(), cs.dim()});
        ASSERT_TRUE(r) << name;
        EXPECT_EQ(r->lhs[0].coef, Scalar::q(d) - Scalar::q(-d)) << name;
    }
}

TEST(Dbos, CatalogVerifiesAtBothLevels) {
    for (auto& name : case_names()) {
        CaseMap cs = builtin_case(name);
        for (Level l : {Level::L1, Level::L2}) {
            VerifyReport r = verify_case(cs, l);
            EXPECT_TRUE(r.ok()) << name << " " << level_name(l) << " failed " << r.failed();
            EXPECT_EQ(r.serre.reconstructed, cs.target.a) << name;
            if (l == Level::L2) EXPECT_EQ((long)r.relations.size(), r.relation_total);
            else EXPECT_LT((long)r.relations.size(), r.relation_total);
        }
    }
}

TEST(Dbos, GaugeInvariance) {
    for (auto name : {"A1-B2", "A2-A3", "B2-B3"}) {
        CaseMap cs = builtin_case(name);
        for (Scalar mu : {Scalar::q(3), Scalar(mkq(-2, 7)), Scalar::q(mkq(1, 2), 5)}) {
            VerifyOptions opt;
            opt.gauge = mu;
            VerifyReport r = verify_case(cs, Level::L2, opt);
            EXPECT_TRUE(r.ok()) << name << " " << mu.str();
        }
    }
}

TEST(Dbos, ExtractionIsDeterministic) {
    CaseMap cs = builtin_case("A2-C3");
    Presentation p = case_presentation(cs);
    std::string first;
    for (int t = 0; t < 3; ++t) {
        CaseImages im = seed_images(cs, cs.targets[0]);
        extract_images(p, im);
        std::string s = dump_images(im);
        if (t == 0) first = s;
        EXPECT_EQ(s, first);
    }
    CaseImages im = seed_images(cs, cs.targets[0]);
    extract_images(p, im);
    for (int i = 0; i < cs.dim(); ++i) {
        EXPECT_TRUE(im.has(Gen{'e', i}));
        EXPECT_TRUE(im.has(Gen{'f', i}));
    }
}

TEST(Dbos, PerturbationIsLocalized) {
    for (auto name : {"A2-A3", "A1-B2", "C3-C4"}) {
        CaseMap cs = builtin_case(name, false);
        Presentation p = case_presentation(cs);
        for (auto gs : {"m+^1_2", "c", "f_1"}) {
            Gen g = Gen::parse(gs);
            VerifyOptions opt;
            opt.perturb = g;
            VerifyReport r = verify_case(cs, Level::L2, opt);
            EXPECT_GT(r.failed(), 0) << name << " " << gs;
            ASSERT_EQ(r.relations.size(), p.relations.size());
            for (std::size_t k = 0; k < p.relations.size(); ++k)
                if (!r.relations[k].pass) {
                    EXPECT_TRUE(p.relations[k].mentions(g)) << name << " " << p.relations[k].str();
                }
        }
    }
}

TEST(Dbos, UnknownPerturbTarget) {
    VerifyOptions opt;
    opt.perturb = Gen{'+', 7, 7};
    EXPECT_THROW(verify_case(builtin_case("A1-A2"), Level::L2, opt), UnknownCase);
}

TEST(Dbos, SerreDetectsSwappedGenerators) {
    CaseMap cs = builtin_case("B2-B3", false);
    Presentation p = case_presentation(cs);
    CaseImages im = seed_images(cs, cs.targets[0]);
    extract_images(p, im);
    TargetGenerators g = target_generators(cs, cs.targets[0], im);
    EXPECT_TRUE(serre_check(cs.target, {g}).ok());
    std::swap(g.E[0], g.E[1]);
    SerreReport bad = serre_check(cs.target, {g});
    EXPECT_FALSE(bad.ok());
    bool ke = false;
    for (auto& r : bad.records) ke = ke || (!r.pass && r.family == "KE");
    EXPECT_TRUE(ke);
}

TEST(Dbos, SideSentinel) {
    for (auto& name : case_names()) EXPECT_TRUE(side_sentinel_ok(builtin_case(name, false))) << name;
    VerifyOptions opt;
    opt.side_reversed = true;
    VerifyReport r = verify_case(builtin_case("A1-A2", false), Level::L1, opt);
    EXPECT_FALSE(r.ok());
}

TEST(Dbos, UnknownCaseAndLevel) {
    EXPECT_THROW(builtin_case("A4-A5"), UnknownCase);
    EXPECT_THROW(parse_level("L3"), UnknownCase);
}

TEST(Dbos, JsonReport) {
    VerifyReport r = verify_case(builtin_case("A1-B2"), Level::L2);
    ordered_json j = to_json(r);
    for (auto k : {"case", "level", "scope", "conventions", "representations", "extracted", "relations", "serre", "summary"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["case"], "A1-B2");
    EXPECT_EQ(j["summary"]["failed"], 0);
    EXPECT_EQ(j["summary"]["checked"], j["relations"].size());
    EXPECT_EQ(j["serre"]["reconstructed_cartan"], j["serre"]["expected_cartan"]);
    EXPECT_EQ(j["representations"].size(), 2u);
    EXPECT_EQ(j["conventions"]["q_star"], "1*q^(2)");
}

TEST(Dbos, ReportDoesNotDependOnThreads) {
    CaseMap cs = builtin_case("A2-C3");
    setenv("QDB_THREADS", "1", 1);
    std::string one = to_json(verify_case(cs, Level::L2)).dump(1);
    setenv("QDB_THREADS", "4", 1);
    std::string four = to_json(verify_case(cs, Level::L2)).dump(1);
    unsetenv("QDB_THREADS");
    EXPECT_EQ(one, four);
}
