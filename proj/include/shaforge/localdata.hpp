#pragma once

#include <string>
#include <vector>

#include "shaforge/ec_core.hpp"
#include "shaforge/intarith.hpp"

namespace shaforge {

enum class Reduction { good, split_mult, nonsplit_mult, additive };

enum class KodairaSeries { I0, In, II, III, IV, I0star, Instar, IVstar, IIIstar, IIstar };

struct LocalData {
    mpz_class p;
    KodairaSeries kodaira = KodairaSeries::I0;
    unsigned long n = 0;  // index for In / In*
    unsigned long f_p = 0;
    unsigned long c_p = 1;
    Reduction reduction = Reduction::good;
};

std::string kodaira_name(const LocalData& ld);

struct GlobalArithData {
    WeierstrassCurve minimal;
    Transform to_minimal;
    mpz_class disc_min;
    Factorization disc_factors;
    mpz_class conductor;
    mpz_class c_fin;
    std::vector<LocalData> locals;  // bad primes, ascending
};

// full Tate algorithm at p, any prime including 2 and 3. Accepts any integral
// model: a model non-minimal at p is rescaled internally, so the result always
// describes the minimal model.
LocalData tate_local(const WeierstrassCurve& c, const mpz_class& p);

// minimalize, factor the minimal discriminant, run tate_local at each bad prime
GlobalArithData global_data(const WeierstrassCurve& c, unsigned effort_digits = 30,
                            FactorCache* cache = nullptr);

}  // namespace shaforge
