#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recurlab/real.hpp"
#include "recurlab/torus.hpp"

namespace recurlab {

/// Periodic integer set {n : n mod N in residues}, kept at the minimal
/// modulus so density and equality are canonical. Upper Banach density is
/// exactly |residues| / N for these sets.
class PeriodicSet {
public:
    static PeriodicSet make(long N, std::vector<long> residues) {
        if (N < 1) throw_invalid("periodic set needs modulus >= 1");
        std::vector<std::uint8_t> mem(static_cast<std::size_t>(N), 0);
        for (long r : residues) {
            if (r < 0 || r >= N) throw_invalid("residue out of [0, N)");
            mem[static_cast<std::size_t>(r)] = 1;
        }
        return canonicalize(N, std::move(mem));
    }

    static PeriodicSet integers() { return make(1, {0}); }

    long modulus() const { return N_; }

    std::vector<long> residues() const {
        std::vector<long> out;
        for (long i = 0; i < N_; ++i)
            if (mem_[static_cast<std::size_t>(i)]) out.push_back(i);
        return out;
    }

    long residue_count() const {
        long c = 0;
        for (auto b : mem_) c += b;
        return c;
    }

    bool empty() const { return residue_count() == 0; }

    bool contains(long long n) const {
        long long r = n % N_;
        if (r < 0) r += N_;
        return mem_[static_cast<std::size_t>(r)] != 0;
    }

    /// d*(A): for periodic sets every Folner limit equals |residues|/N.
    Rat density() const {
        Rat d(residue_count(), N_);
        d.canonicalize();
        return d;
    }

    PeriodicSet shifted(long long m) const {
        std::vector<long> res;
        for (long i = 0; i < N_; ++i) {
            if (!mem_[static_cast<std::size_t>(i)]) continue;
            long long r = (i + m) % N_;
            if (r < 0) r += N_;
            res.push_back(static_cast<long>(r));
        }
        return make(N_, std::move(res));
    }

    PeriodicSet intersect(const PeriodicSet& o) const {
        long L = lcm_long(N_, o.N_);
        std::vector<long> res;
        for (long i = 0; i < L; ++i)
            if (contains(i) && o.contains(i)) res.push_back(i);
        return make(L, std::move(res));
    }

private:
    PeriodicSet(long N, std::vector<std::uint8_t> mem) : N_(N), mem_(std::move(mem)) {}

    static long lcm_long(long a, long b) {
        long g = std::gcd(a, b);
        if (a / g > 1000000000L / b) throw_size_limit("lcm too large");
        return a / g * b;
    }

    static PeriodicSet canonicalize(long N, std::vector<std::uint8_t> mem) {
        for (long d = 1; d <= N; ++d) {
            if (N % d != 0) continue;
            bool periodic = true;
            for (long x = 0; x < N && periodic; ++x)
                if (mem[static_cast<std::size_t>(x)] != mem[static_cast<std::size_t>(x % d)])
                    periodic = false;
            if (periodic) {
                mem.resize(static_cast<std::size_t>(d));
                return PeriodicSet(d, std::move(mem));
            }
        }
        return PeriodicSet(N, std::move(mem));
    }

    long N_;
    std::vector<std::uint8_t> mem_;
};

/// Finite window of integers with explicit membership bits; the finite
/// truncation used wherever the paper's sets are infinite.
class WindowSet {
public:
    WindowSet() = default;

    static WindowSet interval(long long lo, long long hi) {
        if (lo > hi) throw_invalid("window interval is empty");
        WindowSet w;
        w.offset_ = lo;
        w.bits_.assign(static_cast<std::size_t>(hi - lo + 1), 1);
        return w;
    }

    static WindowSet from_elements(std::span<const long long> elems) {
        if (elems.empty()) throw_invalid("window set needs at least one element");
        long long lo = elems[0], hi = elems[0];
        for (long long e : elems) {
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
        WindowSet w;
        w.offset_ = lo;
        w.bits_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
        for (long long e : elems) w.bits_[static_cast<std::size_t>(e - lo)] = 1;
        return w;
    }

    static WindowSet empty_at(long long offset) {
        WindowSet w;
        w.offset_ = offset;
        return w;
    }

    long long offset() const { return offset_; }
    long long lo() const { return offset_; }
    long long hi() const { return offset_ + static_cast<long long>(bits_.size()) - 1; }
    std::size_t span() const { return bits_.size(); }

    bool contains(long long n) const {
        if (n < offset_ || n >= offset_ + static_cast<long long>(bits_.size())) return false;
        return bits_[static_cast<std::size_t>(n - offset_)] != 0;
    }

    void insert(long long n) {
        if (bits_.empty()) {
            offset_ = n;
            bits_.assign(1, 1);
            return;
        }
        if (n < offset_) {
            std::vector<std::uint8_t> nb(static_cast<std::size_t>(offset_ - n) + bits_.size(), 0);
            std::copy(bits_.begin(), bits_.end(), nb.begin() + static_cast<std::size_t>(offset_ - n));
            bits_ = std::move(nb);
            offset_ = n;
        } else if (n > hi()) {
            bits_.resize(static_cast<std::size_t>(n - offset_) + 1, 0);
        }
        bits_[static_cast<std::size_t>(n - offset_)] = 1;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : bits_) c += b;
        return c;
    }

    std::vector<long long> elements() const {
        std::vector<long long> out;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out.push_back(offset_ + static_cast<long long>(i));
        return out;
    }

    WindowSet shifted(long long m) const {
        WindowSet w = *this;
        w.offset_ += m;
        return w;
    }

private:
    long long offset_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// The density pigeonhole: some translate satisfies
/// |(A - n) cap F| >= d*(A) |F|. Returns the maximizing translate within
/// one period (smallest n on ties) together with the exact bound.
struct TranslateHit {
    long n = 0;
    long count = 0;
    long max_count = 0;  // equals count; kept for the audit record
    Rat bound;           // d*(A) |F|
};

inline TranslateHit translate_hitting(const PeriodicSet& A, std::span<const long long> F) {
    if (F.empty()) throw_invalid("translate_hitting: F must be nonempty");
    if (A.empty()) throw_invalid("translate_hitting: A must be nonempty");
    TranslateHit best;
    bool have = false;
    for (long n = 0; n < A.modulus(); ++n) {
        long cnt = 0;
        for (long long f : F)
            if (A.contains(f + n)) ++cnt;
        if (!have || cnt > best.count) {
            have = true;
            best.n = n;
            best.count = cnt;
        }
    }
    best.max_count = best.count;
    best.bound = A.density() * Rat(static_cast<long>(F.size()));
    best.bound.canonicalize();
    if (Rat(best.count) < best.bound)
        throw Error(ErrorKind::certification_failure,
                    "translate_hitting pigeonhole failed (impossible for periodic sets)");
    return best;
}

/// Audit of the extremality of d*(A): every F admits a translate at
/// delta = d*(A), while delta' = d*(A) + 1/(N max|F|) fails on some F
/// (an input family if one fails, else one full period).
struct DeltaAudit {
    Rat delta_star;
    struct Pass {
        std::size_t family_index;
        long n;
        long count;
    };
    std::vector<Pass> passes;
    Rat delta_prime;
    std::string failure_family;  // description of the failing F
    long failure_max_count = 0;
    Rat failure_required;
    bool ok = false;
};

inline DeltaAudit largest_delta_audit(const PeriodicSet& A,
                                      const std::vector<std::vector<long long>>& families) {
    DeltaAudit audit;
    audit.delta_star = A.density();
    std::size_t max_f = 1;
    for (const auto& F : families) max_f = std::max(max_f, F.size());

    for (std::size_t i = 0; i < families.size(); ++i) {
        TranslateHit hit = translate_hitting(A, families[i]);
        audit.passes.push_back({i, hit.n, hit.count});
    }

    audit.delta_prime = audit.delta_star + Rat(1, A.modulus() * static_cast<long>(max_f));
    audit.delta_prime.canonicalize();
    if (audit.delta_star == 1) {
        // No delta' > 1 is meaningful; the audit records that.
        audit.failure_family = "none (density 1)";
        audit.ok = true;
        return audit;
    }

    auto fails_at = [&](std::span<const long long> F, long& max_count) {
        max_count = 0;
        for (long n = 0; n < A.modulus(); ++n) {
            long cnt = 0;
            for (long long f : F)
                if (A.contains(f + n)) ++cnt;
            max_count = std::max(max_count, cnt);
        }
        return Rat(max_count) < audit.delta_prime * Rat(static_cast<long>(F.size()));
    };

    for (std::size_t i = 0; i < families.size(); ++i) {
        long mc = 0;
        if (fails_at(families[i], mc)) {
            audit.failure_family = "input family #" + std::to_string(i);
            audit.failure_max_count = mc;
            audit.failure_required = audit.delta_prime * Rat(static_cast<long>(families[i].size()));
            audit.ok = true;
            return audit;
        }
    }
    // Canonical fallback: a progression of one full period per max|F|
    // always fails, since every translate count is exactly d* |F|.
    std::vector<long long> canonical;
    for (long long x = 0; x < static_cast<long long>(A.modulus()) * static_cast<long long>(max_f); ++x)
        canonical.push_back(x);
    long mc = 0;
    bool failed = fails_at(canonical, mc);
    audit.failure_family = "arithmetic progression [0, N*maxF)";
    audit.failure_max_count = mc;
    audit.failure_required = audit.delta_prime * Rat(static_cast<long>(canonical.size()));
    audit.ok = failed;
    return audit;
}

/// A - A for a periodic set (exact, mod N).
inline PeriodicSet difference_set(const PeriodicSet& A) {
    if (A.empty()) throw_invalid("difference set of an empty set");
    long N = A.modulus();
    auto res = A.residues();
    std::vector<long> diff;
    for (long a : res)
        for (long b : res) {
            long d = (a - b) % N;
            if (d < 0) d += N;
            diff.push_back(d);
        }
    return PeriodicSet::make(N, std::move(diff));
}

/// Exact difference set of the windowed points. As a stand-in for the
/// infinite set's A - A this under-approximates: differences needing
/// points outside the window are missing (window shrinkage).
inline WindowSet difference_set(const WindowSet& S) {
    auto el = S.elements();
    if (el.empty()) throw_invalid("difference set of an empty window set");
    std::vector<long long> diffs;
    diffs.reserve(el.size() * el.size());
    for (long long a : el)
        for (long long b : el) diffs.push_back(a - b);
    return WindowSet::from_elements(diffs);
}

/// |  (1/|S|) sum_{n in S} e(n alpha) |  for rational alpha (exact turns).
inline Real weyl_sum(std::span<const long long> S, const Rat& alpha) {
    if (S.empty()) throw_invalid("weyl_sum: empty index set");
    Rat re_exact = 0, im_exact = 0;
    Real re_f, im_f;
    for (long long n : S) {
        Rat t = mod1(alpha * Rat(static_cast<long>(n)));
        if (auto ex = unit_exact(t)) {
            re_exact += ex->first;
            im_exact += ex->second;
        } else {
            auto [c, s] = unit_circle(t);
            re_f += c;
            im_f += s;
        }
    }
    Real re = Real(re_exact) + re_f;
    Real im = Real(im_exact) + im_f;
    Real norm(static_cast<long>(S.size()));
    return sqrt(re * re + im * im) / norm;
}

/// Same for real alpha (128-bit); used for irrational grid points.
inline Real weyl_sum(std::span<const long long> S, const Real& alpha) {
    if (S.empty()) throw_invalid("weyl_sum: empty index set");
    Real re, im;
    Real two_pi = Real::pi() + Real::pi();
    for (long long n : S) {
        mpfr_t ang, c, s, fr;
        mpfr_init2(ang, Real::kGuardPrec);
        mpfr_init2(fr, Real::kGuardPrec);
        mpfr_init2(c, Real::kPrec);
        mpfr_init2(s, Real::kPrec);
        mpfr_mul_si(ang, alpha.raw(), static_cast<long>(n), MPFR_RNDN);
        mpfr_frac(fr, ang, MPFR_RNDN);  // sin/cos need only the fractional turn
        mpfr_mul(fr, fr, two_pi.raw(), MPFR_RNDN);
        mpfr_sin_cos(s, c, fr, MPFR_RNDN);
        mpfr_add(re.raw(), re.raw(), c, MPFR_RNDN);
        mpfr_add(im.raw(), im.raw(), s, MPFR_RNDN);
        mpfr_clear(s);
        mpfr_clear(c);
        mpfr_clear(fr);
        mpfr_clear(ang);
    }
    Real norm(static_cast<long>(S.size()));
    return sqrt(re * re + im * im) / norm;
}

/// One frequency of a Bohr proxy: alpha with an open arc of the torus.
/// The arc is circular; lo > hi means it wraps through 0.
struct BohrFrequency {
    std::optional<Rat> alpha_exact;  // set when alpha is rational
    Real alpha;
    Real arc_lo, arc_hi;

    static BohrFrequency rational(const Rat& a, double lo, double hi) {
        BohrFrequency f;
        f.alpha_exact = mod1(a);
        f.alpha = Real(*f.alpha_exact);
        f.arc_lo = Real(lo);
        f.arc_hi = Real(hi);
        return f;
    }

    static BohrFrequency irrational(const Real& a, double lo, double hi) {
        BohrFrequency f;
        f.alpha = a;
        f.arc_lo = Real(lo);
        f.arc_hi = Real(hi);
        return f;
    }
};

struct BohrProxy {
    std::vector<BohrFrequency> freqs;
};

namespace detail {

inline Real frac_times(const Real& alpha, long long n) {
    Real out;
    mpfr_t ang;
    mpfr_init2(ang, Real::kGuardPrec);
    mpfr_mul_si(ang, alpha.raw(), static_cast<long>(n), MPFR_RNDN);
    mpfr_frac(ang, ang, MPFR_RNDN);
    if (mpfr_sgn(ang) < 0) mpfr_add_ui(ang, ang, 1, MPFR_RNDN);
    mpfr_set(out.raw(), ang, MPFR_RNDN);
    mpfr_clear(ang);
    return out;
}

inline bool arc_contains(const Real& lo, const Real& hi, const Real& t) {
    if (lo < hi) return lo < t && t < hi;
    // Wrapping arc (lo, 1) union [0, hi); contains 0.
    return t > lo || t < hi;
}

} // namespace detail

struct BohrHit {
    bool hit = false;
    long long witness = 0;
};

/// True iff some n in S lands in every arc: n alpha_i mod 1 in arc_i.
/// Scans ascending, so the witness is the smallest element that hits.
inline BohrHit bohr_hit_test(const WindowSet& S, const BohrProxy& proxy) {
    if (S.count() == 0) throw_invalid("bohr_hit_test: empty window set");
    for (long long n = S.lo(); n <= S.hi(); ++n) {
        if (!S.contains(n)) continue;
        bool all = true;
        for (const auto& f : proxy.freqs) {
            Real t = f.alpha_exact ? Real(mod1(*f.alpha_exact * Rat(static_cast<long>(n))))
                                   : detail::frac_times(f.alpha, n);
            if (!detail::arc_contains(f.arc_lo, f.arc_hi, t)) {
                all = false;
                break;
            }
        }
        if (all) return {true, n};
    }
    return {false, 0};
}

} // namespace recurlab
