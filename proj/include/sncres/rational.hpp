#ifndef SNCRES_RATIONAL_HPP
#define SNCRES_RATIONAL_HPP

#include <gmpxx.h>
#include <string>

#include "sncres/errors.hpp"

namespace sncres {

// Exact rational scalar. All coefficient arithmetic in the project runs on
// this type; there is no floating point anywhere.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat_of(long num, long den = 1) {
    if (den == 0) throw input_error("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat out = 1;
    Rat b = base;
    unsigned long k = e;
    while (k) {
        if (k & 1UL) out *= b;
        b *= b;
        k >>= 1;
    }
    return out;
}

// Exact square root test: returns true and sets root if r = root^2.
inline bool rat_sqrt(const Rat& r, Rat& root) {
    if (sgn(r) < 0) return false;
    Int num = r.get_num(), den = r.get_den();
    Int sn, sd;
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return false;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return false;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    root = Rat(sn, sd);
    root.canonicalize();
    return true;
}

} // namespace sncres

#endif
