#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "recurlab/kronecker.hpp"
#include "recurlab/parallel.hpp"
#include "recurlab/torus.hpp"

namespace recurlab {

/// Element of Lambda_k^r: r coordinates, each a k-th root of unity held
/// as its exponent in [0, k).
struct RootsVector {
    int k = 2;
    int r = 1;
    std::vector<int> exps;

    static RootsVector identity(int k, int r) {
        RootsVector v;
        v.k = k;
        v.r = r;
        v.exps.assign(static_cast<std::size_t>(r), 0);
        return v;
    }

    static RootsVector from_index(int k, int r, std::uint64_t idx) {
        RootsVector v = identity(k, r);
        for (int j = 0; j < r; ++j) {
            v.exps[static_cast<std::size_t>(j)] = static_cast<int>(idx % static_cast<std::uint64_t>(k));
            idx /= static_cast<std::uint64_t>(k);
        }
        return v;
    }

    std::uint64_t index() const {
        std::uint64_t idx = 0;
        for (int j = r - 1; j >= 0; --j)
            idx = idx * static_cast<std::uint64_t>(k) +
                  static_cast<std::uint64_t>(exps[static_cast<std::size_t>(j)]);
        return idx;
    }

    RootsVector product(const RootsVector& o) const {
        require_same_shape(o);
        RootsVector v = *this;
        for (int j = 0; j < r; ++j)
            v.exps[static_cast<std::size_t>(j)] =
                (exps[static_cast<std::size_t>(j)] + o.exps[static_cast<std::size_t>(j)]) % k;
        return v;
    }

    RootsVector inverse() const {
        RootsVector v = *this;
        for (auto& e : v.exps) e = (k - e) % k;
        return v;
    }

    void require_same_shape(const RootsVector& o) const {
        if (k != o.k || r != o.r)
            throw_dimension("roots vectors have mismatched (k, r)");
    }
};

/// Half the euclidean distance between the roots e(a/k) and e(b/k):
/// sin(pi * d / k) with d the cyclic exponent gap. Exact 0 and (for even
/// k at the antipode) exact 1.
inline Real d0(int a, int b, int k) {
    if (a < 0 || b < 0 || a >= k || b >= k) throw_invalid("d0 exponent out of range");
    int d = a - b;
    if (d < 0) d = -d;
    if (k - d < d) d = k - d;
    return sin_pi_turns(Rat(d, k));
}

inline std::optional<Rat> d0_exact(int a, int b, int k) {
    int d = a - b;
    if (d < 0) d = -d;
    if (k - d < d) d = k - d;
    if (d == 0) return rat(0);
    if (2 * d == k) return rat(1);
    return std::nullopt;
}

/// Translation invariant metric d(x, y) = sum_j d0(x_j, y_j), diameter <= r.
/// Coordinates at gap 0 or k/2 accumulate exactly; for k = 2 the result
/// is therefore exactly the Hamming distance.
inline Real distance(const RootsVector& x, const RootsVector& y) {
    x.require_same_shape(y);
    Rat exact = 0;
    Real approx;
    for (int j = 0; j < x.r; ++j) {
        int a = x.exps[static_cast<std::size_t>(j)];
        int b = y.exps[static_cast<std::size_t>(j)];
        if (auto e = d0_exact(a, b, x.k))
            exact += *e;
        else
            approx += d0(a, b, x.k);
    }
    return Real(exact) + approx;
}

struct BallSpec {
    RootsVector center;
    double t = 0.0;
};

/// Subset of Lambda_k^r as a bitset over the canonical mixed-radix index.
class SubsetOfGroup {
public:
    SubsetOfGroup(int k, int r) : k_(k), r_(r) {
        if (k < 2 || r < 1) throw_invalid("subset requires k >= 2, r >= 1");
        n_ = 1;
        for (int j = 0; j < r; ++j) {
            n_ *= static_cast<std::uint64_t>(k);
            if (n_ > (1ULL << 24)) throw_size_limit("k^r exceeds the 2^24 enumeration guard");
        }
        bits_.assign((n_ + 63) / 64, 0);
    }

    int k() const { return k_; }
    int r() const { return r_; }
    std::uint64_t group_size() const { return n_; }

    bool test(std::uint64_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
    void set(std::uint64_t i) { bits_[i >> 6] |= (1ULL << (i & 63)); }
    void reset(std::uint64_t i) { bits_[i >> 6] &= ~(1ULL << (i & 63)); }

    std::uint64_t count() const {
        std::uint64_t c = 0;
        for (auto w : bits_) c += static_cast<std::uint64_t>(__builtin_popcountll(w));
        return c;
    }

    std::vector<std::uint64_t> elements() const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t i = 0; i < n_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }

private:
    int k_, r_;
    std::uint64_t n_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Hamming ball U_t(x) = {y : d(x, y) <= t}, with a 1e-12 tie tolerance.
/// Audit radii are chosen off the tie lattice, so the tolerance never
/// decides a case that matters.
inline SubsetOfGroup ball(const BallSpec& spec) {
    const int k = spec.center.k;
    const int r = spec.center.r;
    SubsetOfGroup out(k, r);
    const Real limit = Real(spec.t) + Real(1e-12);

    // Pairwise d0 values, reused across the odometer sweep.
    std::vector<Real> table(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            table[static_cast<std::size_t>(a) * k + b] = d0(a, b, k);

    std::vector<int> cur(static_cast<std::size_t>(r), 0);
    Real dist;
    for (int j = 0; j < r; ++j)
        dist += table[static_cast<std::size_t>(spec.center.exps[static_cast<std::size_t>(j)]) * k];
    const std::uint64_t n = out.group_size();
    for (std::uint64_t idx = 0;; ++idx) {
        if (dist <= limit) out.set(idx);
        if (idx + 1 == n) break;
        // Odometer increment with incremental distance update.
        for (int j = 0; j < r; ++j) {
            int c = spec.center.exps[static_cast<std::size_t>(j)];
            int old = cur[static_cast<std::size_t>(j)];
            int nxt = old + 1 == k ? 0 : old + 1;
            cur[static_cast<std::size_t>(j)] = nxt;
            dist -= table[static_cast<std::size_t>(c) * k + old];
            dist += table[static_cast<std::size_t>(c) * k + nxt];
            if (nxt != 0) break;
        }
    }
    return out;
}

namespace detail {

/// Index arithmetic for Lambda_k^r with a dense multiplication table when
/// it fits; audits stay within the |A|^2 <= 2^32 double-loop guard.
struct GroupOps {
    int k, r;
    std::uint64_t n;
    std::vector<std::uint32_t> mul;   // n*n table when n <= 2048
    std::vector<std::uint32_t> inv;   // n entries

    GroupOps(int k_, int r_) : k(k_), r(r_) {
        n = 1;
        for (int j = 0; j < r; ++j) n *= static_cast<std::uint64_t>(k);
        inv.resize(n);
        for (std::uint64_t a = 0; a < n; ++a) inv[a] = static_cast<std::uint32_t>(inv_slow(a));
        if (n <= 2048) {
            mul.resize(n * n);
            for (std::uint64_t a = 0; a < n; ++a)
                for (std::uint64_t b = 0; b < n; ++b)
                    mul[a * n + b] = static_cast<std::uint32_t>(mul_slow(a, b));
        }
    }

    std::uint64_t mul_slow(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t out = 0, place = 1;
        for (int j = 0; j < r; ++j) {
            std::uint64_t da = a % static_cast<std::uint64_t>(k);
            std::uint64_t db = b % static_cast<std::uint64_t>(k);
            a /= static_cast<std::uint64_t>(k);
            b /= static_cast<std::uint64_t>(k);
            out += ((da + db) % static_cast<std::uint64_t>(k)) * place;
            place *= static_cast<std::uint64_t>(k);
        }
        return out;
    }

    std::uint64_t inv_slow(std::uint64_t a) const {
        std::uint64_t out = 0, place = 1;
        for (int j = 0; j < r; ++j) {
            std::uint64_t da = a % static_cast<std::uint64_t>(k);
            a /= static_cast<std::uint64_t>(k);
            out += ((static_cast<std::uint64_t>(k) - da) % static_cast<std::uint64_t>(k)) * place;
            place *= static_cast<std::uint64_t>(k);
        }
        return out;
    }

    std::uint64_t mul_idx(std::uint64_t a, std::uint64_t b) const {
        if (!mul.empty()) return mul[a * n + b];
        return mul_slow(a, b);
    }
};

} // namespace detail

struct GrowthRecord {
    std::uint64_t product_card = 0;
    Rat ratio;       // |A U_t(0)| / |G|
    Real bound;      // 1 - alpha^{-1} exp(-t^2 / 2r)
    bool pass = false;
};

/// |A * U_t(0)| with the product-set growth bound of the concentration
/// inequality; asserts the bound holds for the given A.
inline GrowthRecord product_growth(const SubsetOfGroup& A, double t) {
    if (A.count() == 0) throw_invalid("product_growth: empty subset");
    detail::GroupOps ops(A.k(), A.r());
    SubsetOfGroup U = ball({RootsVector::identity(A.k(), A.r()), t});
    auto a_el = A.elements();
    auto u_el = U.elements();
    if (static_cast<double>(a_el.size()) * static_cast<double>(u_el.size()) > 4294967296.0)
        throw_size_limit("product double loop exceeds 2^32 guard");
    SubsetOfGroup P(A.k(), A.r());
    for (auto a : a_el)
        for (auto u : u_el) P.set(ops.mul_idx(a, u));

    GrowthRecord rec;
    rec.product_card = P.count();
    rec.ratio = Rat(static_cast<long>(rec.product_card), static_cast<long>(A.group_size()));
    rec.ratio.canonicalize();
    Real alpha = Real(Rat(static_cast<long>(a_el.size()), static_cast<long>(A.group_size())));
    Real expo = exp(Real(-(t * t)) / Real(2.0 * A.r()));
    rec.bound = Real(1L) - expo / alpha;
    rec.pass = Real(rec.ratio) >= rec.bound;
    return rec;
}

struct AvoidanceRecord {
    bool vacuous = false;   // difference set meets the ball; no hypothesis
    bool disjoint = false;
    Rat alpha;
    Real bound;             // exp(-t^2 / 4r)
    bool pass = true;
};

/// Audits the avoidance implication: if (A^-1 A) misses U_t(x), the
/// density of A is at most exp(-t^2/4r).
inline AvoidanceRecord avoidance_bound_check(const SubsetOfGroup& A, const RootsVector& x,
                                             double t) {
    detail::GroupOps ops(A.k(), A.r());
    auto a_el = A.elements();
    AvoidanceRecord rec;
    rec.alpha = Rat(static_cast<long>(a_el.size()), static_cast<long>(A.group_size()));
    rec.alpha.canonicalize();
    rec.bound = exp(Real(-(t * t)) / Real(4.0 * A.r()));
    if (a_el.empty()) {
        rec.vacuous = true;
        return rec;
    }
    if (static_cast<double>(a_el.size()) * static_cast<double>(a_el.size()) > 4294967296.0)
        throw_size_limit("difference double loop exceeds 2^32 guard");
    SubsetOfGroup D(A.k(), A.r());
    for (auto a : a_el)
        for (auto b : a_el) D.set(ops.mul_idx(ops.inv[a], b));
    SubsetOfGroup U = ball({x, t});
    bool disjoint = true;
    for (auto u : U.elements())
        if (D.test(u)) {
            disjoint = false;
            break;
        }
    rec.disjoint = disjoint;
    if (!disjoint) {
        rec.vacuous = true;  // hypothesis fails; nothing to check
        rec.pass = true;
        return rec;
    }
    rec.pass = Real(rec.alpha) <= rec.bound;
    return rec;
}

/// Smallest N with exp(-eps^2 N / 4) < delta. Arguments within 1e-9 of an
/// exact integer crossing snap to it, so inputs like delta = e^-1 resolve
/// deterministically.
inline long min_r_for(double delta, double eps) {
    if (!(delta > 0.0 && delta < 1.0)) throw_invalid("min_r_for: delta must lie in (0,1)");
    if (!(eps > 0.0)) throw_invalid("min_r_for: eps must be positive");
    Real x = Real(4L) * log(Real(1L) / Real(delta)) / (Real(eps) * Real(eps));
    double xd = x.to_double();
    double rounded = std::round(xd);
    long fl;
    if (std::abs(xd - rounded) < 1e-9)
        fl = static_cast<long>(rounded);
    else
        fl = static_cast<long>(std::floor(xd));
    long N = fl + 1;
    return N < 1 ? 1 : N;
}

/// The bijection between P-measurable Lambda_k-valued step functions and
/// Lambda_k^r, plus the metric identity ||psi1 - psi2||_L1 = (2/r) d.
inline RootsVector bridge_to_group(const EqualPartition& P, const std::vector<int>& cell_exps,
                                   int k) {
    if (cell_exps.size() != static_cast<std::size_t>(P.r))
        throw_invalid("bridge: one exponent per cell required");
    RootsVector v = RootsVector::identity(k, P.r);
    for (int j = 0; j < P.r; ++j) {
        int e = cell_exps[static_cast<std::size_t>(j)];
        if (e < 0 || e >= k) throw_invalid("bridge: exponent out of range");
        v.exps[static_cast<std::size_t>(j)] = e;
    }
    return v;
}

inline std::vector<int> bridge_from_group(const RootsVector& v) {
    return v.exps;
}

/// Step function on sigma that is constant with value e(exps[c]/k) on
/// partition cell c.
inline StepFunction step_from_cells(const AtomicMeasure& sigma, const EqualPartition& P,
                                    const std::vector<int>& cell_exps, int k) {
    if (cell_exps.size() != static_cast<std::size_t>(P.r))
        throw_invalid("bridge: one exponent per cell required");
    StepFunction f;
    f.turns.assign(sigma.size(), UnimodularValue{rat(0)});
    std::vector<bool> seen(sigma.size(), false);
    for (int c = 0; c < P.r; ++c) {
        Rat turn = mod1(Rat(cell_exps[static_cast<std::size_t>(c)], k));
        for (std::size_t idx : P.cells[static_cast<std::size_t>(c)]) {
            f.turns[idx] = UnimodularValue{turn};
            seen[idx] = true;
        }
    }
    for (bool s : seen)
        if (!s) throw_invalid("partition does not cover the measure's atoms");
    return f;
}

struct BridgeCheck {
    Real l1;
    Real scaled_distance;  // (2/r) * d(bridge psi1, bridge psi2)
    bool pass = false;
};

inline BridgeCheck l1_bridge_check(const AtomicMeasure& sigma, const EqualPartition& P,
                                   const std::vector<int>& psi1, const std::vector<int>& psi2,
                                   int k) {
    StepFunction f1 = step_from_cells(sigma, P, psi1, k);
    StepFunction f2 = step_from_cells(sigma, P, psi2, k);
    BridgeCheck out;
    out.l1 = l1_step_distance(sigma, f1, f2);
    RootsVector v1 = bridge_to_group(P, psi1, k);
    RootsVector v2 = bridge_to_group(P, psi2, k);
    out.scaled_distance = Real(2L) / Real(static_cast<long>(P.r)) * distance(v1, v2);
    out.pass = abs(out.l1 - out.scaled_distance) <= Real(1e-12);
    return out;
}

/// One violation found by an audit sweep.
struct ConcentrationWitness {
    std::string lemma;            // "growth" or "avoidance"
    double t = 0;
    std::uint64_t center = 0;     // element index (avoidance only)
    std::vector<std::uint64_t> subset_elements;
    std::string detail;
};

struct ConcentrationAuditReport {
    int k = 0, r = 0;
    std::vector<double> ts;
    std::uint64_t subsets_checked = 0;
    std::uint64_t violations = 0;
    std::vector<ConcentrationWitness> witnesses;  // capped at 16
};

/// Exhaustive audit over every nonempty subset of Lambda_k^r (requires
/// k^r <= 16 so subsets fit in machine masks). Checks the growth bound at
/// every radius and the avoidance implication at every (radius, center).
inline ConcentrationAuditReport concentration_exhaustive_audit(
    int k, int r, const std::vector<double>& ts, const std::vector<std::uint64_t>& centers,
    unsigned workers = 1) {
    detail::GroupOps ops(k, r);
    if (ops.n > 16) throw_size_limit("exhaustive audit requires k^r <= 16");
    const unsigned n = static_cast<unsigned>(ops.n);
    const std::uint32_t full = n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1);

    // Ball masks and per-element product rows, one set per radius.
    std::vector<std::uint32_t> u_mask(ts.size());
    std::vector<std::vector<std::uint32_t>> row_prod(ts.size());
    std::vector<std::vector<std::uint32_t>> center_mask(ts.size());
    std::vector<Real> growth_exp(ts.size()), avoid_bound(ts.size());
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        SubsetOfGroup U = ball({RootsVector::identity(k, r), ts[ti]});
        std::uint32_t um = 0;
        for (auto u : U.elements()) um |= (1u << u);
        u_mask[ti] = um;
        row_prod[ti].assign(n, 0);
        for (unsigned a = 0; a < n; ++a) {
            std::uint32_t m = 0;
            for (unsigned u = 0; u < n; ++u)
                if (um & (1u << u)) m |= (1u << ops.mul_idx(a, u));
            row_prod[ti][a] = m;
        }
        center_mask[ti].assign(centers.size(), 0);
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            SubsetOfGroup Uc = ball({RootsVector::from_index(k, r, centers[ci]), ts[ti]});
            std::uint32_t m = 0;
            for (auto u : Uc.elements()) m |= (1u << u);
            center_mask[ti][ci] = m;
        }
        growth_exp[ti] = exp(Real(-(ts[ti] * ts[ti])) / Real(2.0 * r));
        avoid_bound[ti] = exp(Real(-(ts[ti] * ts[ti])) / Real(4.0 * r));
    }

    // Growth: violation iff |A U| < n (1 - (n/|A|) e), precomputed as an
    // integer threshold per (radius, |A|). Radii sit off the tie lattice,
    // so the 1e-18 slack cannot flip a genuine case.
    std::vector<std::vector<long>> min_prod(ts.size(), std::vector<long>(n + 1, 0));
    std::vector<long> max_card(ts.size());
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        for (unsigned a = 1; a <= n; ++a) {
            Real bound = Real(static_cast<long>(n)) *
                         (Real(1L) - Real(static_cast<long>(n)) / Real(static_cast<long>(a)) *
                                         growth_exp[ti]);
            double b = (bound - Real(1e-18)).to_double();
            min_prod[ti][a] = b <= 0 ? 0 : static_cast<long>(std::ceil(b));
        }
        double mc = (Real(static_cast<long>(n)) * avoid_bound[ti] + Real(1e-18)).to_double();
        max_card[ti] = static_cast<long>(std::floor(mc));
    }

    const std::uint64_t total = static_cast<std::uint64_t>(full);
    std::vector<std::uint64_t> chunk_viol(workers == 0 ? 1 : workers, 0);
    std::vector<std::vector<ConcentrationWitness>> chunk_wit(workers == 0 ? 1 : workers);

    parallel_chunks(total, workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        for (std::uint64_t mi = begin; mi < end; ++mi) {
            const std::uint32_t A = static_cast<std::uint32_t>(mi + 1);  // skip empty
            const int card = __builtin_popcount(A);
            // A^-1 A via the double loop over members.
            std::uint32_t D = 0;
            for (unsigned a = 0; a < n; ++a) {
                if (!(A & (1u << a))) continue;
                const std::uint32_t ia = ops.inv[a];
                for (unsigned b2 = 0; b2 < n; ++b2)
                    if (A & (1u << b2)) D |= (1u << ops.mul_idx(ia, b2));
            }
            for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                std::uint32_t P = 0;
                std::uint32_t rest = A;
                while (rest) {
                    unsigned a = static_cast<unsigned>(__builtin_ctz(rest));
                    rest &= rest - 1;
                    P |= row_prod[ti][a];
                }
                if (__builtin_popcount(P) < min_prod[ti][static_cast<unsigned>(card)]) {
                    ++chunk_viol[chunk];
                    if (chunk_wit[chunk].size() < 16) {
                        ConcentrationWitness w;
                        w.lemma = "growth";
                        w.t = ts[ti];
                        for (unsigned e = 0; e < n; ++e)
                            if (A & (1u << e)) w.subset_elements.push_back(e);
                        w.detail = "product card " + std::to_string(__builtin_popcount(P));
                        chunk_wit[chunk].push_back(std::move(w));
                    }
                }
                for (std::size_t ci = 0; ci < centers.size(); ++ci) {
                    if ((D & center_mask[ti][ci]) != 0) continue;  // hypothesis vacuous
                    if (card > max_card[ti]) {
                        ++chunk_viol[chunk];
                        if (chunk_wit[chunk].size() < 16) {
                            ConcentrationWitness w;
                            w.lemma = "avoidance";
                            w.t = ts[ti];
                            w.center = centers[ci];
                            for (unsigned e = 0; e < n; ++e)
                                if (A & (1u << e)) w.subset_elements.push_back(e);
                            w.detail = "density exceeds exp bound";
                            chunk_wit[chunk].push_back(std::move(w));
                        }
                    }
                }
            }
        }
    });

    ConcentrationAuditReport rep;
    rep.k = k;
    rep.r = r;
    rep.ts = ts;
    rep.subsets_checked = total;
    for (std::size_t c = 0; c < chunk_viol.size(); ++c) {
        rep.violations += chunk_viol[c];
        for (auto& w : chunk_wit[c])
            if (rep.witnesses.size() < 16) rep.witnesses.push_back(std::move(w));
    }
    return rep;
}

/// Seeded sampled audit for sizes beyond the exhaustive guard. Each
/// sample is drawn from its own seeded stream, so results do not depend
/// on the worker count.
inline ConcentrationAuditReport concentration_sampled_audit(
    int k, int r, const std::vector<double>& ts, const std::vector<std::uint64_t>& centers,
    std::uint64_t samples, std::uint64_t seed, unsigned workers = 1) {
    detail::GroupOps ops(k, r);
    if (ops.n > 2048) throw_size_limit("sampled audit requires k^r <= 2048");
    const std::uint64_t n = ops.n;

    std::vector<std::vector<std::uint64_t>> u_elems(ts.size());
    std::vector<std::vector<std::vector<std::uint64_t>>> uc_elems(ts.size());
    std::vector<Real> growth_exp(ts.size()), avoid_bound(ts.size());
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        u_elems[ti] = ball({RootsVector::identity(k, r), ts[ti]}).elements();
        uc_elems[ti].resize(centers.size());
        for (std::size_t ci = 0; ci < centers.size(); ++ci)
            uc_elems[ti][ci] = ball({RootsVector::from_index(k, r, centers[ci]), ts[ti]}).elements();
        growth_exp[ti] = exp(Real(-(ts[ti] * ts[ti])) / Real(2.0 * r));
        avoid_bound[ti] = exp(Real(-(ts[ti] * ts[ti])) / Real(4.0 * r));
    }

    std::vector<std::uint64_t> chunk_viol(workers == 0 ? 1 : workers, 0);
    std::vector<std::vector<ConcentrationWitness>> chunk_wit(workers == 0 ? 1 : workers);

    parallel_chunks(samples, workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        std::vector<std::uint8_t> inA(n), inD(n), inP(n);
        for (std::uint64_t si = begin; si < end; ++si) {
            std::mt19937_64 rng(mix_seed(seed, si));
            std::fill(inA.begin(), inA.end(), 0);
            std::vector<std::uint64_t> a_el;
            for (std::uint64_t e = 0; e < n; ++e)
                if (rng() & 1) {
                    inA[e] = 1;
                    a_el.push_back(e);
                }
            if (a_el.empty()) {
                std::uint64_t e = rng() % n;
                inA[e] = 1;
                a_el.push_back(e);
            }
            std::fill(inD.begin(), inD.end(), 0);
            for (auto a : a_el) {
                std::uint64_t ia = ops.inv[a];
                for (auto b : a_el) inD[ops.mul_idx(ia, b)] = 1;
            }
            for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                std::fill(inP.begin(), inP.end(), 0);
                for (auto a : a_el)
                    for (auto u : u_elems[ti]) inP[ops.mul_idx(a, u)] = 1;
                std::uint64_t pc = 0;
                for (auto v : inP) pc += v;
                Real bound = Real(static_cast<long>(n)) *
                             (Real(1L) - Real(static_cast<long>(n)) /
                                             Real(static_cast<long>(a_el.size())) * growth_exp[ti]);
                if (Real(static_cast<long>(pc)) < bound - Real(1e-12)) {
                    ++chunk_viol[chunk];
                    if (chunk_wit[chunk].size() < 16)
                        chunk_wit[chunk].push_back(
                            {"growth", ts[ti], 0, a_el, "sampled violation"});
                }
                for (std::size_t ci = 0; ci < centers.size(); ++ci) {
                    bool disjoint = true;
                    for (auto u : uc_elems[ti][ci])
                        if (inD[u]) {
                            disjoint = false;
                            break;
                        }
                    if (!disjoint) continue;
                    Real alpha = Real(static_cast<long>(a_el.size())) / Real(static_cast<long>(n));
                    if (alpha > avoid_bound[ti] + Real(1e-12)) {
                        ++chunk_viol[chunk];
                        if (chunk_wit[chunk].size() < 16)
                            chunk_wit[chunk].push_back(
                                {"avoidance", ts[ti], centers[ci], a_el, "sampled violation"});
                    }
                }
            }
        }
    });

    ConcentrationAuditReport rep;
    rep.k = k;
    rep.r = r;
    rep.ts = ts;
    rep.subsets_checked = samples;
    for (std::size_t c = 0; c < chunk_viol.size(); ++c) {
        rep.violations += chunk_viol[c];
        for (auto& w : chunk_wit[c])
            if (rep.witnesses.size() < 16) rep.witnesses.push_back(std::move(w));
    }
    return rep;
}

} // namespace recurlab
