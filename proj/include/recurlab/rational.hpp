#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "recurlab/errors.hpp"

namespace recurlab {

/// Exact rational scalar. GMP keeps values canonical (lowest terms,
/// positive denominator), which the torus types rely on for equality.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw_invalid("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "p/q" or "p" (optionally signed). Used by every JSON surface.
inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw_invalid("empty rational literal");
    Rat q;
    if (q.set_str(s, 10) != 0)
        throw_invalid("malformed rational literal: '" + s + "'");
    if (q.get_den() == 0) throw_invalid("rational with zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string rat_to_string(const Rat& q) {
    return q.get_str();
}

/// q reduced mod 1 into [0, 1).
inline Rat mod1(const Rat& q) {
    Rat r;
    mpz_fdiv_r(r.get_num_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    r.get_den() = q.get_den();
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rat& q) {
    return q.get_den() == 1;
}

/// floor(q) for values that fit a long.
inline long floor_long(const Rat& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    if (!f.fits_slong_p()) throw_size_limit("floor out of long range");
    return f.get_si();
}

inline long ceil_long(const Rat& q) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    if (!c.fits_slong_p()) throw_size_limit("ceil out of long range");
    return c.get_si();
}

/// b^e as an exact integer-valued rational (no overflow).
inline Rat rat_pow(long b, unsigned e) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(b), e);
    return Rat(z);
}

/// b^e guarded to fit in int64; callers that index characters by
/// machine integers go through this.
inline long long checked_ipow(long b, unsigned e) {
    long long acc = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (acc > (0x3FFFFFFFFFFFFFFFLL / b))
            throw_size_limit("integer power exceeds machine range");
        acc *= b;
    }
    return acc;
}

/// Deterministic 64-bit mix used to derive per-block RNG streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace recurlab
