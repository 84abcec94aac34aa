#include "shaforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "shaforge/errors.hpp"
#include "shaforge/util.hpp"

namespace shaforge {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string cache_file(const std::string& dir, const std::string& curve_text,
                       const mpz_class& m) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%08x", crc32(curve_text));
    return dir + "/ap_" + tag + "_" + m.get_str() + ".bin";
}

}  // namespace

ClassOutcome analyze_class(const std::vector<WeierstrassCurve>& curves,
                           const AnalysisOptions& opts) {
    if (curves.empty()) throw InternalError("analyze_class needs at least one curve");
    ClassOutcome out;
    out.k_used = opts.k;
    out.members.resize(curves.size());

    struct MemberWork {
        bool ok = false;
        GlobalArithData g;
        TorsionInfo torsion;
        RealPeriod period;
    };
    std::vector<MemberWork> work(curves.size());
    FactorCache cache;

    // arithmetic stage: minimal model, conductor, local data
    for (size_t i = 0; i < curves.size(); ++i) {
        MemberOutcome& m = out.members[i];
        m.index = static_cast<int>(i) + 1;
        m.curve_text = curve_to_string(curves[i]);
        auto t0 = Clock::now();
        try {
            work[i].g = global_data(curves[i], opts.effort_digits, &cache);
            work[i].ok = true;
        } catch (const FactorTooHard&) {
            m.status = ShaStatus::unfactored;
        }
        if (work[i].ok) {
            m.arithmetic_done = true;
            m.minimal_text = curve_to_string(work[i].g.minimal);
            m.conductor = work[i].g.conductor;
            m.disc_min = work[i].g.disc_min;
            m.locals = work[i].g.locals;
            m.c_fin = work[i].g.c_fin;
        }
        m.seconds = seconds_since(t0);
    }

    size_t carrier = curves.size();
    for (size_t i = 0; i < curves.size(); ++i) {
        if (work[i].ok) {
            carrier = i;
            break;
        }
    }
    if (carrier == curves.size()) return out;  // nothing factorable
    const mpz_class conductor = work[carrier].g.conductor;
    for (const MemberWork& w : work) {
        if (w.ok && w.g.conductor != conductor)
            throw ClassInconsistent("class members disagree on the conductor");
    }

    if (opts.conductor_only) return out;

    // torsion and real period per member, then settle the digit budget: a large
    // quotient prefactor would otherwise eat the requested decimal accuracy
    TruncationPlan plan = plan_truncation(conductor, opts.k);
    unsigned extra = 0;
    for (size_t i = 0; i < curves.size(); ++i) {
        if (!work[i].ok) continue;
        auto t0 = Clock::now();
        work[i].torsion = torsion_order(work[i].g);
        work[i].period = real_period(work[i].g.minimal, plan.work_digits);
        extra = std::max(extra, sha_extra_digits(work[i].torsion, work[i].period,
                                                 work[i].g.c_fin, opts.k));
        out.members[i].torsion = work[i].torsion.order;
        out.members[i].two_torsion = work[i].torsion.two_torsion;
        out.members[i].seconds += seconds_since(t0);
    }
    unsigned k_eff = opts.k + extra;
    out.k_used = k_eff;
    if (extra != 0) {
        plan = plan_truncation(conductor, k_eff);
        for (MemberWork& w : work) {
            if (w.ok) w.period = real_period(w.g.minimal, plan.work_digits);
        }
    }
    for (size_t i = 0; i < curves.size(); ++i) {
        if (work[i].ok)
            out.members[i].c_infty = work[i].period.c_infty.str(static_cast<int>(k_eff) + 4);
    }
    out.m_total = plan.m_total;

    if (!plan.m_total.fits_ulong_p() || plan.m_total.get_ui() > opts.max_terms) {
        for (size_t i = 0; i < curves.size(); ++i) {
            if (work[i].ok) out.members[i].status = ShaStatus::budget_exceeded;
        }
        return out;
    }

    // one coefficient table and one series pass serve the whole class
    auto t0 = Clock::now();
    uint64_t mt = plan.m_total.get_ui();
    const std::string carrier_text = curve_to_string(work[carrier].g.minimal);
    ApTable tab;
    bool loaded = false;
    if (!opts.ap_cache_dir.empty()) {
        loaded = load_ap_cache(cache_file(opts.ap_cache_dir, carrier_text, plan.m_total),
                               carrier_text, mt, &tab);
    }
    if (!loaded) {
        tab = build_ap_table(work[carrier].g.minimal, work[carrier].g, mt, opts.workers);
        if (!opts.ap_cache_dir.empty()) {
            try {
                std::filesystem::create_directories(opts.ap_cache_dir);
                save_ap_cache(cache_file(opts.ap_cache_dir, carrier_text, plan.m_total),
                              carrier_text, tab);
            } catch (const std::exception&) {
                // cache is best effort; analysis output does not depend on it
            }
        }
    }
    LTruncation l =
        approximate_l1(work[carrier].g.minimal, work[carrier].g, tab, plan, opts.workers);
    out.members[carrier].seconds += seconds_since(t0);

    for (size_t i = 0; i < curves.size(); ++i) {
        if (!work[i].ok) continue;
        MemberOutcome& m = out.members[i];
        auto t1 = Clock::now();
        m.w = l.w;
        m.w_certain = l.w_certain;
        m.s_m = l.s_m.str(static_cast<int>(k_eff) + 4);
        ShaResult sr = analytic_sha(l, work[i].torsion, work[i].period, work[i].g, k_eff);
        m.status = sr.status;
        m.sha = sr.sha;
        m.sha_sqrt = sr.sha_sqrt;
        m.gs = sr.gs;
        m.seconds += seconds_since(t1);
    }
    return out;
}

MemberOutcome analyze_curve(const WeierstrassCurve& curve, const AnalysisOptions& opts) {
    return analyze_class({curve}, opts).members.at(0);
}

}  // namespace shaforge
