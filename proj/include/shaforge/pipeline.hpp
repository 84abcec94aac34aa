#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "shaforge/ap_engine.hpp"
#include "shaforge/bsd.hpp"
#include "shaforge/ec_core.hpp"
#include "shaforge/intarith.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/lseries.hpp"

namespace shaforge {

struct AnalysisOptions {
    unsigned k = 3;                    // requested decimal accuracy of the quotient
    unsigned effort_digits = 30;       // factoring effort bound
    uint64_t max_terms = 100'000'000;  // series budget; larger plans are refused
    unsigned workers = 1;
    bool conductor_only = false;       // stop after conductor computation
    std::string ap_cache_dir;          // reuse coefficient tables when nonempty
};

// flat per-curve record; string fields are empty when the stage did not run
struct MemberOutcome {
    int index = 1;
    std::string curve_text;    // input model
    std::string minimal_text;  // global minimal model
    ShaStatus status = ShaStatus::ok;
    bool arithmetic_done = false;  // conductor, locals, disc below are valid
    mpz_class conductor;
    mpz_class disc_min;
    std::vector<LocalData> locals;
    mpz_class c_fin;
    unsigned torsion = 0;
    unsigned two_torsion = 0;
    std::string c_infty;  // real period factor, decimal
    std::string s_m;      // truncated series value, decimal
    int w = 1;            // functional-equation sign estimate
    bool w_certain = false;
    mpz_class sha;
    mpz_class sha_sqrt;
    std::string gs;
    double seconds = 0.0;
};

struct ClassOutcome {
    unsigned k_used = 0;
    mpz_class m_total;  // series length analysed; 0 when no series was needed
    std::vector<MemberOutcome> members;
};

// analyse one isogeny class; the expensive series work is shared since all
// members have the same L-function. curves must be non-empty.
ClassOutcome analyze_class(const std::vector<WeierstrassCurve>& curves,
                           const AnalysisOptions& opts);

// single-curve convenience wrapper
MemberOutcome analyze_curve(const WeierstrassCurve& curve, const AnalysisOptions& opts);

}  // namespace shaforge
