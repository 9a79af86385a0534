#pragma once

#include <stdint.h>

#define MPFR_USE_INTMAX_T
#include <mpfr.h>

#include <cstdio>
#include <optional>
#include <string>
#include <utility>

#include "recurlab/rational.hpp"

namespace recurlab {

/// Fixed-precision real scalar with a 128-bit mantissa (MPFR backed).
/// Every operation is correctly rounded, so accumulated error across the
/// sums used in this project stays far below the documented 1e-12 bound.
class Real {
public:
    static constexpr mpfr_prec_t kPrec = 128;
    // Guard precision for internal pi-multiples before the final rounding.
    static constexpr mpfr_prec_t kGuardPrec = 192;

    Real() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
    explicit Real(double d) { mpfr_init2(v_, kPrec); mpfr_set_d(v_, d, MPFR_RNDN); }
    explicit Real(long n) { mpfr_init2(v_, kPrec); mpfr_set_si(v_, n, MPFR_RNDN); }
    explicit Real(long long n) { mpfr_init2(v_, kPrec); mpfr_set_sj(v_, n, MPFR_RNDN); }
    explicit Real(const Rat& q) { mpfr_init2(v_, kPrec); mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }

    Real(const Real& o) { mpfr_init2(v_, kPrec); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, kPrec); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    std::string str(int digits = 24) const {
        char fmt[32];
        std::snprintf(fmt, sizeof(fmt), "%%.%dRg", digits);
        char buf[128];
        mpfr_snprintf(buf, sizeof(buf), fmt, v_);
        return buf;
    }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend Real operator+(Real a, const Real& b) { a += b; return a; }
    friend Real operator-(Real a, const Real& b) { a -= b; return a; }
    friend Real operator*(Real a, const Real& b) { a *= b; return a; }
    friend Real operator/(Real a, const Real& b) { a /= b; return a; }
    friend Real operator-(Real a) { mpfr_neg(a.v_, a.v_, MPFR_RNDN); return a; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) != 0; }

    friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

    friend Real abs(Real a) { mpfr_abs(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Real sqrt(Real a) { mpfr_sqrt(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Real exp(Real a) { mpfr_exp(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Real log(Real a) { mpfr_log(a.v_, a.v_, MPFR_RNDN); return a; }

    static Real pi() {
        Real r;
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

private:
    mpfr_t v_;
};

namespace detail {

/// sin(pi * q) for q in [0, 1], computed at guard precision.
inline void sin_pi_unit(mpfr_ptr out, const Rat& q) {
    mpfr_t x;
    mpfr_init2(x, Real::kGuardPrec);
    mpfr_const_pi(x, MPFR_RNDN);
    mpfr_t t;
    mpfr_init2(t, Real::kGuardPrec);
    mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(x, x, t, MPFR_RNDN);
    mpfr_sin(out, x, MPFR_RNDN);
    mpfr_clear(t);
    mpfr_clear(x);
}

} // namespace detail

/// sin(pi * t) for a rational number of turns t, folded into [0,1).
/// Exact at the lattice points t = 0 and t = 1/2.
inline Real sin_pi_turns(const Rat& turns) {
    Rat u = mod1(turns);
    if (u == 0) return Real();
    if (u == rat(1, 2)) return Real(1L);
    // sin(pi u) = sin(pi (1-u)); folding keeps the argument small.
    if (u > rat(1, 2)) u = 1 - u;
    Real r;
    detail::sin_pi_unit(r.raw(), u);
    return r;
}

/// Circular distance between two turn values, folded into [0, 1/2].
inline Rat circ_dist_turns(const Rat& a, const Rat& b) {
    Rat d = mod1(a - b);
    if (d > rat(1, 2)) d = 1 - d;
    return d;
}

/// |e(a) - e(b)| = 2 sin(pi * circ(a-b)) for turn values a, b.
/// Exact when the circular distance is 0 (-> 0) or 1/2 (-> 2).
inline Real chord_turns(const Rat& a, const Rat& b) {
    Rat d = circ_dist_turns(a, b);
    if (d == 0) return Real();
    if (d == rat(1, 2)) return Real(2L);
    Real r = sin_pi_turns(d);
    return r + r;
}

/// Rational chord value when the distance sits on an exact lattice point,
/// letting callers accumulate those terms without rounding.
inline std::optional<Rat> chord_exact(const Rat& a, const Rat& b) {
    Rat d = circ_dist_turns(a, b);
    if (d == 0) return rat(0);
    if (d == rat(1, 2)) return rat(2);
    return std::nullopt;
}

/// cos/sin of 2*pi*t. Quarter-turn inputs give exact rational outputs,
/// reported through the optional pair so sums can stay rational.
inline std::optional<std::pair<Rat, Rat>> unit_exact(const Rat& turns) {
    Rat u = mod1(turns);
    if (u == 0) return std::make_pair(rat(1), rat(0));
    if (u == rat(1, 4)) return std::make_pair(rat(0), rat(1));
    if (u == rat(1, 2)) return std::make_pair(rat(-1), rat(0));
    if (u == rat(3, 4)) return std::make_pair(rat(0), rat(-1));
    return std::nullopt;
}

inline std::pair<Real, Real> unit_circle(const Rat& turns) {
    if (auto ex = unit_exact(turns)) return {Real(ex->first), Real(ex->second)};
    Rat u = mod1(turns);
    mpfr_t x, t;
    mpfr_init2(x, Real::kGuardPrec);
    mpfr_init2(t, Real::kGuardPrec);
    mpfr_const_pi(x, MPFR_RNDN);
    mpfr_mul_ui(x, x, 2, MPFR_RNDN);
    mpfr_set_q(t, u.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(x, x, t, MPFR_RNDN);
    Real c, s;
    mpfr_sin_cos(s.raw(), c.raw(), x, MPFR_RNDN);
    mpfr_clear(t);
    mpfr_clear(x);
    return {c, s};
}

} // namespace recurlab
