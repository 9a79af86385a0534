#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "recurlab/integer_sets.hpp"
#include "recurlab/rational.hpp"

namespace recurlab {

/// Finite measure preserving system: a permutation of {0,...,n-1} with
/// the uniform measure 1/n per point. Cyclic permutations realize
/// rotations, which are the uniquely ergodic models used throughout.
class FinitePermSystem {
public:
    static FinitePermSystem make(std::vector<std::uint32_t> perm) {
        if (perm.empty()) throw_invalid("system needs at least one point");
        std::vector<std::uint8_t> seen(perm.size(), 0);
        for (auto p : perm) {
            if (p >= perm.size()) throw_invalid("permutation image out of range");
            if (seen[p]) throw_invalid("permutation is not a bijection");
            seen[p] = 1;
        }
        FinitePermSystem sys;
        sys.perm_ = std::move(perm);
        sys.decompose();
        return sys;
    }

    static FinitePermSystem cyclic(std::size_t N) {
        if (N == 0) throw_invalid("cyclic system needs N >= 1");
        std::vector<std::uint32_t> p(N);
        for (std::size_t i = 0; i < N; ++i) p[i] = static_cast<std::uint32_t>((i + 1) % N);
        return make(std::move(p));
    }

    std::size_t size() const { return perm_.size(); }
    const std::vector<std::uint32_t>& perm() const { return perm_; }

    std::size_t cycle_count() const { return cycles_.size(); }
    bool is_single_cycle() const { return cycles_.size() == 1; }
    const std::vector<std::vector<std::uint32_t>>& cycles() const { return cycles_; }

    /// lcm of cycle lengths, saturating at 2^62.
    unsigned long long order() const {
        unsigned long long ord = 1;
        const unsigned long long cap = 1ULL << 62;
        for (const auto& c : cycles_) {
            unsigned long long len = c.size();
            unsigned long long g = std::gcd(ord, len);
            if (ord / g > cap / len) return cap;
            ord = ord / g * len;
        }
        return ord;
    }

    /// T^n(x) through the cached cycle decomposition; n may be negative.
    std::size_t apply_pow(std::size_t x, long long n) const {
        const auto& cyc = cycles_[cycle_id_[x]];
        long long len = static_cast<long long>(cyc.size());
        long long pos = (static_cast<long long>(pos_in_cycle_[x]) + n) % len;
        if (pos < 0) pos += len;
        return cyc[static_cast<std::size_t>(pos)];
    }

private:
    void decompose() {
        cycle_id_.assign(perm_.size(), 0);
        pos_in_cycle_.assign(perm_.size(), 0);
        std::vector<std::uint8_t> seen(perm_.size(), 0);
        for (std::size_t start = 0; start < perm_.size(); ++start) {
            if (seen[start]) continue;
            std::vector<std::uint32_t> cyc;
            std::size_t x = start;
            while (!seen[x]) {
                seen[x] = 1;
                cycle_id_[x] = static_cast<std::uint32_t>(cycles_.size());
                pos_in_cycle_[x] = static_cast<std::uint32_t>(cyc.size());
                cyc.push_back(static_cast<std::uint32_t>(x));
                x = perm_[x];
            }
            cycles_.push_back(std::move(cyc));
        }
    }

    std::vector<std::uint32_t> perm_;
    std::vector<std::vector<std::uint32_t>> cycles_;
    std::vector<std::uint32_t> cycle_id_;
    std::vector<std::uint32_t> pos_in_cycle_;
};

/// Marked subset D of a system's ground set, as membership bytes.
using MarkedSet = std::vector<std::uint8_t>;

inline MarkedSet marked_from_points(const FinitePermSystem& sys, std::span<const long> pts) {
    MarkedSet D(sys.size(), 0);
    for (long p : pts) {
        if (p < 0 || static_cast<std::size_t>(p) >= sys.size())
            throw_invalid("marked point out of range");
        D[static_cast<std::size_t>(p)] = 1;
    }
    return D;
}

inline std::size_t marked_count(const MarkedSet& D) {
    std::size_t c = 0;
    for (auto b : D) c += b;
    return c;
}

inline Rat measure_of(const FinitePermSystem& sys, const MarkedSet& D) {
    Rat m(static_cast<long>(marked_count(D)), static_cast<long>(sys.size()));
    m.canonicalize();
    return m;
}

/// mu(D cap T^n D), exactly. Convention: T^n D is the forward image, and
/// the count |{x in D : T^n x in D}| equals mu(D cap T^-n D), which by
/// invariance equals mu(T^n D cap D).
inline Rat correlation(const FinitePermSystem& sys, const MarkedSet& D, long long n) {
    if (D.size() != sys.size()) throw_dimension("marked set size mismatch");
    long cnt = 0;
    for (std::size_t x = 0; x < D.size(); ++x)
        if (D[x] && D[sys.apply_pow(x, n)]) ++cnt;
    Rat c(cnt, static_cast<long>(sys.size()));
    c.canonicalize();
    return c;
}

/// Smallest n in S (by |n|, negative before positive) with positive
/// correlation, or nothing.
inline std::optional<long long> recurrence_witness(std::span<const long long> S,
                                                   const FinitePermSystem& sys,
                                                   const MarkedSet& D) {
    std::vector<long long> ordered(S.begin(), S.end());
    std::sort(ordered.begin(), ordered.end(), [](long long a, long long b) {
        long long aa = a < 0 ? -a : a, ab = b < 0 ? -b : b;
        return aa != ab ? aa < ab : a < b;
    });
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
    for (long long n : ordered)
        if (correlation(sys, D, n) > 0) return n;
    return std::nullopt;
}

/// Fixed finite certification battery: (system, D, delta) instances
/// standing in for "every measure preserving system".
struct BatteryInstance {
    FinitePermSystem sys;
    MarkedSet D;
    Rat delta;
    std::string id;
};

struct Battery {
    std::vector<BatteryInstance> instances;
};

struct CertifyEntry {
    std::string id;
    long long witness = 0;
    Rat corr;
};

struct CertifyOutcome {
    bool certified = false;
    std::vector<CertifyEntry> entries;
    std::vector<std::string> skipped;  // instances with mu(D) <= delta
    std::optional<std::string> failing_id;
};

/// Certificate that S is a set of delta-recurrence against the battery:
/// one positive-correlation witness per instance with mu(D) > delta.
inline CertifyOutcome delta_recurrence_certify(std::span<const long long> S,
                                               const Battery& battery, const Rat& delta) {
    CertifyOutcome out;
    out.certified = true;
    for (const auto& inst : battery.instances) {
        if (measure_of(inst.sys, inst.D) <= delta) {
            out.skipped.push_back(inst.id);
            continue;
        }
        auto w = recurrence_witness(S, inst.sys, inst.D);
        if (!w) {
            out.certified = false;
            out.failing_id = inst.id;
            return out;
        }
        out.entries.push_back({inst.id, *w, correlation(inst.sys, inst.D, *w)});
    }
    return out;
}

/// Correlations along s_n + m with the supremum over the last quartile,
/// the finite stand-in for a tail limit.
struct ProfileReport {
    std::vector<Rat> values;
    std::size_t tail_from = 0;
    Rat tail_sup;
};

inline ProfileReport strong_recurrence_profile(std::span<const long long> S,
                                               const FinitePermSystem& sys, const MarkedSet& D,
                                               long long m) {
    if (S.empty()) throw_invalid("strong_recurrence_profile: empty enumeration");
    ProfileReport rep;
    rep.values.reserve(S.size());
    for (long long s : S) rep.values.push_back(correlation(sys, D, s + m));
    rep.tail_from = S.size() - (S.size() + 3) / 4;
    rep.tail_sup = 0;
    for (std::size_t i = rep.tail_from; i < rep.values.size(); ++i)
        rep.tail_sup = std::max(rep.tail_sup, rep.values[i]);
    return rep;
}

/// Rohlin-type splitting of a single cycle: every second point along the
/// cycle, dropping one when the length is odd, so D cap TD is empty and
/// mu(D) >= (1 - eps)/2. Feasibility is checked exactly.
inline MarkedSet rohlin_split(const FinitePermSystem& sys, const Rat& eps) {
    if (!sys.is_single_cycle()) throw_invalid("rohlin_split needs a cyclic system");
    std::size_t M = sys.size();
    if (M < 2) throw_invalid("rohlin_split needs at least two points");
    const auto& cyc = sys.cycles()[0];
    MarkedSet D(M, 0);
    std::size_t take = M / 2;
    for (std::size_t i = 0; i < take; ++i) D[cyc[2 * i]] = 1;
    Rat mu(static_cast<long>(take), static_cast<long>(M));
    mu.canonicalize();
    if (mu < (1 - eps) / 2)
        throw_invalid("cycle too small for the requested eps (odd M needs M >= 1/eps)");
    for (std::size_t x = 0; x < M; ++x)
        if (D[x] && D[sys.apply_pow(x, 1)])
            throw Error(ErrorKind::construction_failure, "rohlin split not disjoint from image");
    return D;
}

/// Return-time set A = {m : T^m x in D} as a periodic set with modulus
/// the orbit length. When the orbit is the whole cycle, the return-set
/// identity density(A cap (A - n)) = correlation(n) is verified exactly.
inline PeriodicSet orbit_return_set(const FinitePermSystem& sys, const MarkedSet& D,
                                    std::size_t x) {
    if (x >= sys.size()) throw_invalid("orbit point out of range");
    if (D.size() != sys.size()) throw_dimension("marked set size mismatch");
    // Walk the orbit of x.
    std::vector<long> residues;
    std::size_t len = 0;
    std::size_t y = x;
    do {
        if (D[y]) residues.push_back(static_cast<long>(len));
        y = sys.apply_pow(y, 1);
        ++len;
    } while (y != x);
    PeriodicSet A = PeriodicSet::make(static_cast<long>(len), std::move(residues));
    if (sys.is_single_cycle()) {
        for (long n = 0; n < static_cast<long>(len); ++n) {
            Rat lhs = A.intersect(A.shifted(-n)).density();
            if (lhs != correlation(sys, D, n))
                throw Error(ErrorKind::certification_failure,
                            "return-set identity failed on a full cycle");
        }
    }
    return A;
}

/// Furstenberg correspondence, exact for periodic sets: the rotation on
/// Z/N with D = residues satisfies mu(D cap T^-m D) = d*(A cap (A-m)).
struct Correspondence {
    FinitePermSystem sys;
    MarkedSet D;
};

inline Correspondence correspondence_forward(const PeriodicSet& A) {
    if (A.empty()) throw_invalid("correspondence_forward: empty set");
    FinitePermSystem sys = FinitePermSystem::cyclic(static_cast<std::size_t>(A.modulus()));
    MarkedSet D(sys.size(), 0);
    for (long r : A.residues()) D[static_cast<std::size_t>(r)] = 1;
    // Exactness check over one period.
    for (long m = 0; m < A.modulus(); ++m) {
        Rat lhs = A.intersect(A.shifted(-m)).density();
        Rat rhs = correlation(sys, D, m);
        if (lhs != rhs)
            throw Error(ErrorKind::certification_failure,
                        "correspondence equality failed (periodic realization)");
    }
    return {std::move(sys), std::move(D)};
}

struct ReverseCorrespondence {
    PeriodicSet A;
    std::size_t base_point = 0;
    bool checks_pass = false;
};

/// Reverse correspondence: the return-time set of the densest orbit has
/// d*(A) >= mu(D) and A - A inside R_0(D); both checked over one period
/// of the relevant moduli.
inline ReverseCorrespondence correspondence_reverse(const FinitePermSystem& sys,
                                                    const MarkedSet& D) {
    if (marked_count(D) == 0) throw_invalid("correspondence_reverse: empty marked set");
    // Densest orbit, smallest starting point on ties.
    std::size_t best_point = 0;
    Rat best_density(-1);
    for (const auto& cyc : sys.cycles()) {
        long hits = 0;
        for (auto p : cyc) hits += D[p];
        Rat dens(hits, static_cast<long>(cyc.size()));
        dens.canonicalize();
        std::size_t start = *std::min_element(cyc.begin(), cyc.end());
        if (dens > best_density ||
            (dens == best_density && start < best_point)) {
            best_density = dens;
            best_point = start;
        }
    }
    ReverseCorrespondence out{orbit_return_set(sys, D, best_point), best_point, false};
    if (out.A.density() < measure_of(sys, D))
        throw Error(ErrorKind::certification_failure, "reverse correspondence density failed");
    PeriodicSet diff = difference_set(out.A);
    long L = diff.modulus();
    unsigned long long ord = sys.order();
    unsigned long long period = std::lcm<unsigned long long>(static_cast<unsigned long long>(L),
                                                             ord);
    if (period > (1ULL << 22)) period = 1ULL << 22;  // audit window cap
    for (unsigned long long m = 0; m < period; ++m) {
        if (!diff.contains(static_cast<long long>(m))) continue;
        if (!(correlation(sys, D, static_cast<long long>(m)) > 0))
            throw Error(ErrorKind::certification_failure,
                        "A - A escaped R_0(D) in reverse correspondence");
    }
    out.checks_pass = true;
    return out;
}

/// Product system on the cartesian ground set, componentwise action.
inline FinitePermSystem product(const FinitePermSystem& X, const FinitePermSystem& Y) {
    if (X.size() * Y.size() > (1ULL << 20)) throw_size_limit("product ground set too large");
    std::size_t ny = Y.size();
    std::vector<std::uint32_t> perm(X.size() * Y.size());
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = 0; y < ny; ++y)
            perm[x * ny + y] =
                static_cast<std::uint32_t>(X.perm()[x] * ny + Y.perm()[y]);
    return FinitePermSystem::make(std::move(perm));
}

struct UnionCheck {
    Rat measure;
    bool full = false;
};

/// mu( union_{n in S} T^n D ), exactly.
inline UnionCheck ergodic_union_check(std::span<const long long> S, const FinitePermSystem& sys,
                                      const MarkedSet& D) {
    if (marked_count(D) == 0) throw_invalid("ergodic_union_check: empty marked set");
    MarkedSet hit(sys.size(), 0);
    for (long long n : S)
        for (std::size_t x = 0; x < sys.size(); ++x)
            if (D[x]) hit[sys.apply_pow(x, n)] = 1;
    UnionCheck out;
    out.measure = measure_of(sys, hit);
    out.full = (out.measure == 1);
    return out;
}

/// Count of S cap (n0 + A - A) inside the window, with nested prefix
/// counts so growth across windows is visible.
struct ShiftAuditReport {
    long long count = 0;
    std::vector<std::pair<long long, long long>> nested;  // (window span, count)
};

inline ShiftAuditReport shift_infinite_audit(const WindowSet& S, const PeriodicSet& A,
                                             long long n0) {
    PeriodicSet diff = difference_set(A);
    ShiftAuditReport rep;
    auto members = S.elements();
    for (long long n : members)
        if (diff.contains(n - n0)) ++rep.count;
    // Nested prefixes of the window: quarters, half, full.
    for (int div : {4, 2, 1}) {
        long long span = static_cast<long long>(S.span()) / div;
        long long cnt = 0;
        for (long long n : members) {
            if (n - S.lo() >= span) break;
            if (diff.contains(n - n0)) ++cnt;
        }
        rep.nested.emplace_back(span, cnt);
    }
    return rep;
}

struct OptimalAverage {
    Rat average;
    Rat mu_squared;
    bool at_least = false;
};

/// (1/|S|) sum_{n in S} mu(D cap T^n D), exactly, with the mu(D)^2 flag.
inline OptimalAverage optimal_recurrence_average(std::span<const long long> S,
                                                 const FinitePermSystem& sys,
                                                 const MarkedSet& D) {
    if (S.empty()) throw_invalid("optimal_recurrence_average: empty set");
    Rat sum = 0;
    for (long long n : S) sum += correlation(sys, D, n);
    OptimalAverage out;
    out.average = sum / Rat(static_cast<long>(S.size()));
    out.average.canonicalize();
    Rat mu = measure_of(sys, D);
    out.mu_squared = mu * mu;
    out.mu_squared.canonicalize();
    out.at_least = out.average >= out.mu_squared;
    return out;
}

/// Default certification battery: cyclic systems of orders 2..12 with
/// Rohlin splittings and seeded random subsets, plus three coprime
/// products (again with Rohlin splittings of the product cycle).
inline Battery default_battery(std::uint64_t seed = 20240601) {
    Battery bat;
    for (std::size_t N = 2; N <= 12; ++N) {
        FinitePermSystem sys = FinitePermSystem::cyclic(N);
        Rat eps = N % 2 == 0 ? rat(1, 4) : Rat(1, static_cast<long>(N));
        MarkedSet D = rohlin_split(sys, eps);
        Rat delta = measure_of(sys, D);
        bat.instances.push_back({FinitePermSystem::cyclic(N), std::move(D), delta,
                                 "cyclic" + std::to_string(N) + "-rohlin"});

        std::mt19937_64 rng(mix_seed(seed, N));
        MarkedSet R(N, 0);
        std::size_t size = 1 + static_cast<std::size_t>(rng() % (N - 1));
        std::size_t placed = 0;
        while (placed < size) {
            std::size_t p = static_cast<std::size_t>(rng() % N);
            if (!R[p]) {
                R[p] = 1;
                ++placed;
            }
        }
        Rat rdelta = measure_of(sys, R);
        bat.instances.push_back({FinitePermSystem::cyclic(N), std::move(R), rdelta,
                                 "cyclic" + std::to_string(N) + "-rand"});
    }
    const std::pair<std::size_t, std::size_t> pairs[] = {{2, 3}, {3, 4}, {5, 7}};
    for (auto [a, b] : pairs) {
        FinitePermSystem prod = product(FinitePermSystem::cyclic(a), FinitePermSystem::cyclic(b));
        MarkedSet D = rohlin_split(prod, rat(1, 4));
        Rat delta = measure_of(prod, D);
        bat.instances.push_back({std::move(prod), std::move(D), delta,
                                 "product" + std::to_string(a) + "x" + std::to_string(b)});
    }
    return bat;
}

} // namespace recurlab
