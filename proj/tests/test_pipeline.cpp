#include <gmpxx.h>

#include <filesystem>
#include <string>

#include "doctest.h"
#include "shaforge/bsd.hpp"
#include "shaforge/ec_core.hpp"
#include "shaforge/errors.hpp"
#include "shaforge/family.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/lseries.hpp"
#include "shaforge/pipeline.hpp"

using namespace shaforge;

namespace {

AnalysisOptions with_k(unsigned k) {
    AnalysisOptions o;
    o.k = k;
    return o;
}

}  // namespace

TEST_CASE("single rank-zero curve end to end") {
    MemberOutcome m = analyze_curve(parse_curve("[0,-1,1,-10,-20]"), with_k(3));
    CHECK(m.status == ShaStatus::ok);
    CHECK(m.arithmetic_done);
    CHECK(m.conductor == 11);
    CHECK(m.minimal_text == "[0,-1,1,-10,-20]");
    CHECK(m.locals.size() == 1);
    CHECK(m.c_fin == 5);
    CHECK(m.torsion == 5);
    CHECK(m.two_torsion == 1);
    CHECK(m.w == 1);
    CHECK(m.w_certain);
    CHECK(m.sha == 1);
    CHECK(m.sha_sqrt == 1);
    CHECK(m.gs == "0.3015113445");
    CHECK_FALSE(m.s_m.empty());
    CHECK_FALSE(m.c_infty.empty());
    CHECK(m.seconds >= 0.0);
}

TEST_CASE("class analysis agrees with member-by-member analysis") {
    auto curves = family_class(1, mpz_class(5));
    ClassOutcome cls = analyze_class(curves, with_k(3));
    REQUIRE(cls.members.size() == 4);
    CHECK(cls.m_total > 0);
    for (size_t i = 0; i < curves.size(); ++i) {
        const MemberOutcome& m = cls.members[i];
        CHECK(m.index == static_cast<int>(i) + 1);
        CHECK(m.arithmetic_done);
        CHECK(m.conductor == cls.members[0].conductor);
        CHECK((m.status == ShaStatus::ok || m.status == ShaStatus::apparent_positive_rank ||
               m.status == ShaStatus::not_a_square));
        MemberOutcome solo = analyze_curve(curves[i], with_k(3));
        CHECK(solo.status == m.status);
        CHECK(solo.sha == m.sha);
        CHECK(solo.torsion == m.torsion);
        CHECK(solo.s_m == m.s_m);
        CHECK(solo.gs == m.gs);
    }
}

TEST_CASE("positive-rank classes are flagged uniformly across members") {
    // odd functional-equation sign with a flat probe signal: every member
    // must land on the rank guard, none on a bogus quotient
    ClassOutcome cls = analyze_class(family_class(0, mpz_class(-39)), with_k(3));
    REQUIRE(cls.members.size() == 4);
    for (const MemberOutcome& m : cls.members) {
        CHECK(m.status == ShaStatus::apparent_positive_rank);
        CHECK(m.w == -1);
        CHECK(m.w_certain);
        CHECK(m.sha == 0);
    }
}

TEST_CASE("conductor-only mode stops after arithmetic") {
    AnalysisOptions o = with_k(3);
    o.conductor_only = true;
    MemberOutcome m = analyze_curve(parse_curve("[0,-1,1,-10,-20]"), o);
    CHECK(m.status == ShaStatus::ok);
    CHECK(m.conductor == 11);
    CHECK(m.torsion == 0);
    CHECK(m.c_infty.empty());
    CHECK(m.s_m.empty());
}

TEST_CASE("series budget is enforced before any table is built") {
    AnalysisOptions o = with_k(3);
    o.max_terms = 3;
    MemberOutcome m = analyze_curve(parse_curve("[0,-1,1,-10,-20]"), o);
    CHECK(m.status == ShaStatus::budget_exceeded);
    CHECK(m.torsion == 5);  // arithmetic and torsion still reported
    CHECK_FALSE(m.c_infty.empty());
    CHECK(m.s_m.empty());
    CHECK(m.sha == 0);
}

TEST_CASE("unfactorable discriminants are reported, not fatal") {
    mpz_class m61 = (mpz_class(1) << 61) - 1;
    mpz_class m89 = (mpz_class(1) << 89) - 1;
    WeierstrassCurve hard{0, 0, 0, m61 * m89, 0};
    MemberOutcome m = analyze_curve(hard, with_k(3));
    CHECK(m.status == ShaStatus::unfactored);
    CHECK_FALSE(m.arithmetic_done);
    CHECK(m.conductor == 0);

    // a class with one factorable member still analyses that member
    ClassOutcome cls = analyze_class({parse_curve("[0,-1,1,-10,-20]"), hard}, with_k(3));
    CHECK(cls.members[0].status == ShaStatus::ok);
    CHECK(cls.members[0].sha == 1);
    CHECK(cls.members[1].status == ShaStatus::unfactored);
}

TEST_CASE("conductor disagreement inside a class is an error") {
    CHECK_THROWS_AS(
        analyze_class({parse_curve("[0,-1,1,-10,-20]"), parse_curve("[0,0,1,-1,0]")}, with_k(3)),
        ClassInconsistent);
}

TEST_CASE("digit budget escalates for large quotient prefactors") {
    WeierstrassCurve c = family_curve(1, 20, mpz_class(-756));
    GlobalArithData g = global_data(c);
    TorsionInfo tors = torsion_order(g);
    TruncationPlan base = plan_truncation(g.conductor, 3);
    RealPeriod period = real_period(g.minimal, base.work_digits);
    unsigned extra = sha_extra_digits(tors, period, g.c_fin, 3);
    REQUIRE(extra > 0);  // tiny period, so the quotient prefactor is huge

    MemberOutcome m = analyze_curve(c, with_k(3));
    CHECK(m.conductor == mpz_class("42551829106699251024"));
    CHECK(m.status == ShaStatus::budget_exceeded);  // escalated series is far too long
    CHECK(m.torsion == tors.order);

    ClassOutcome cls = analyze_class({c}, with_k(3));
    CHECK(cls.k_used == 3 + extra);
    CHECK(cls.m_total == plan_truncation(g.conductor, cls.k_used).m_total);
    CHECK(cls.m_total > 100'000'000);
}

TEST_CASE("coefficient cache round trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "shaforge_cache_test";
    fs::remove_all(dir);
    AnalysisOptions o = with_k(4);
    o.ap_cache_dir = dir.string();
    MemberOutcome first = analyze_curve(parse_curve("[0,0,0,-1,0]"), o);
    CHECK(first.status == ShaStatus::ok);
    bool have_file = false;
    for (const auto& e : fs::directory_iterator(dir)) have_file |= e.is_regular_file();
    CHECK(have_file);
    MemberOutcome second = analyze_curve(parse_curve("[0,0,0,-1,0]"), o);
    CHECK(second.status == first.status);
    CHECK(second.sha == first.sha);
    CHECK(second.s_m == first.s_m);
    fs::remove_all(dir);
}

TEST_CASE("outcome strings do not depend on worker count") {
    AnalysisOptions one = with_k(6);
    AnalysisOptions many = with_k(6);
    many.workers = 3;
    MemberOutcome a = analyze_curve(parse_curve("[0,0,0,-1,0]"), one);
    MemberOutcome b = analyze_curve(parse_curve("[0,0,0,-1,0]"), many);
    CHECK(a.s_m == b.s_m);
    CHECK(a.c_infty == b.c_infty);
    CHECK(a.sha == b.sha);
    CHECK(a.gs == b.gs);
}
