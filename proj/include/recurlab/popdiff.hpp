#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "recurlab/rational.hpp"

namespace recurlab {

/// Subset of Z/N. Membership bytes keep shifts and counts cheap at the
/// exact-search sizes this module guards (N <= 256).
struct CyclicSubset {
    long N = 1;
    std::vector<std::uint8_t> members;

    static CyclicSubset make(long N, std::vector<long> elems) {
        if (N < 1) throw_invalid("cyclic subset needs N >= 1");
        CyclicSubset s;
        s.N = N;
        s.members.assign(static_cast<std::size_t>(N), 0);
        for (long e : elems) {
            if (e < 0 || e >= N) throw_invalid("element out of [0, N)");
            s.members[static_cast<std::size_t>(e)] = 1;
        }
        return s;
    }

    static CyclicSubset empty(long N) { return make(N, {}); }

    bool contains(long g) const {
        long r = g % N;
        if (r < 0) r += N;
        return members[static_cast<std::size_t>(r)] != 0;
    }

    long count() const {
        long c = 0;
        for (auto b : members) c += b;
        return c;
    }

    std::vector<long> elements() const {
        std::vector<long> out;
        for (long g = 0; g < N; ++g)
            if (members[static_cast<std::size_t>(g)]) out.push_back(g);
        return out;
    }

    CyclicSubset shifted_down(long n0) const {  // E - n0
        CyclicSubset s = *this;
        for (long g = 0; g < N; ++g) {
            long src = (g + n0) % N;
            if (src < 0) src += N;
            s.members[static_cast<std::size_t>(g)] = members[static_cast<std::size_t>(src)];
        }
        return s;
    }
};

/// P_c(A) = {g : |A cap (A - g)| > c N}, by direct counting with the
/// strict inequality of the definition preserved as an exact rational
/// comparison.
inline CyclicSubset popular_set(const CyclicSubset& A, const Rat& c, long guard = 256) {
    if (c < 0) throw_invalid("popular_set: c must be >= 0");
    if (A.N > guard) throw_size_limit("popular_set guarded to N <= " + std::to_string(guard));
    const long N = A.N;
    std::vector<long> counts(static_cast<std::size_t>(N), 0);
    auto el = A.elements();
    for (long a : el)
        for (long b : el) {
            long g = (a - b) % N;
            if (g < 0) g += N;
            ++counts[static_cast<std::size_t>(g)];
        }
    Rat cn = c * N;
    CyclicSubset P = CyclicSubset::empty(N);
    for (long g = 0; g < N; ++g)
        if (Rat(counts[static_cast<std::size_t>(g)]) > cn)
            P.members[static_cast<std::size_t>(g)] = 1;
    return P;
}

namespace detail {

/// Bit-parallel branch and bound maximum clique (greedy coloring bound,
/// vertices pre-ordered by degree). N <= 64 so candidate sets are words.
class CliqueSolver {
public:
    CliqueSolver(const std::vector<std::uint64_t>& adj, int n) : adj_(adj), n_(n) {}

    int solve(std::vector<int>& witness) {
        best_ = 0;
        best_set_ = 0;
        cur_.clear();
        std::uint64_t all = n_ == 64 ? ~0ULL : ((1ULL << n_) - 1);
        expand(all);
        witness.clear();
        for (int v = 0; v < n_; ++v)
            if (best_set_ & (1ULL << v)) witness.push_back(v);
        return best_;
    }

private:
    void expand(std::uint64_t P) {
        if (P == 0) {
            if (static_cast<int>(cur_.size()) > best_) {
                best_ = static_cast<int>(cur_.size());
                std::uint64_t s = 0;
                for (int v : cur_) s |= (1ULL << v);
                best_set_ = s;
            }
            return;
        }
        // Greedy coloring: order vertices so color[i] bounds the clique
        // extension possible from order[i..].
        int order[64];
        int color[64];
        int cnt = 0;
        std::uint64_t Q = P;
        int c = 0;
        while (Q) {
            ++c;
            std::uint64_t cand = Q;
            while (cand) {
                int v = __builtin_ctzll(cand);
                cand &= ~(adj_[static_cast<std::size_t>(v)] | (1ULL << v));
                Q &= ~(1ULL << v);
                order[cnt] = v;
                color[cnt] = c;
                ++cnt;
            }
        }
        std::uint64_t avail = P;
        for (int i = cnt - 1; i >= 0; --i) {
            if (static_cast<int>(cur_.size()) + color[i] <= best_) return;
            int v = order[i];
            cur_.push_back(v);
            std::uint64_t next = avail & adj_[static_cast<std::size_t>(v)];
            if (next == 0) {
                if (static_cast<int>(cur_.size()) > best_) {
                    best_ = static_cast<int>(cur_.size());
                    std::uint64_t s = 0;
                    for (int u : cur_) s |= (1ULL << u);
                    best_set_ = s;
                }
            } else {
                expand(next);
            }
            cur_.pop_back();
            avail &= ~(1ULL << v);
        }
    }

    const std::vector<std::uint64_t>& adj_;
    int n_;
    int best_ = 0;
    std::uint64_t best_set_ = 0;
    std::vector<int> cur_;
};

} // namespace detail

struct CliqueResult {
    int size = 0;
    std::vector<long> witness;
};

/// Largest B with B - B inside E, via maximum clique on the Cayley-type
/// graph with edges {x, y} iff both x - y and y - x lie in E. Requires
/// 0 in E for any nonempty B, since 0 is always a difference.
inline CliqueResult max_diffset_inside(const CyclicSubset& E, long guard = 64) {
    const long N = E.N;
    if (N > guard) throw_size_limit("clique search guarded to N <= " + std::to_string(guard));
    CliqueResult out;
    if (!E.contains(0)) return out;
    std::vector<std::uint64_t> adj(static_cast<std::size_t>(N), 0);
    for (long x = 0; x < N; ++x)
        for (long y = x + 1; y < N; ++y) {
            if (E.contains(x - y) && E.contains(y - x)) {
                adj[static_cast<std::size_t>(x)] |= (1ULL << y);
                adj[static_cast<std::size_t>(y)] |= (1ULL << x);
            }
        }
    detail::CliqueSolver solver(adj, static_cast<int>(N));
    std::vector<int> wit;
    out.size = solver.solve(wit);
    out.witness.assign(wit.begin(), wit.end());
    return out;
}

struct TranslatedDiffset {
    bool found = false;
    long n0 = 0;
    CliqueResult best;
};

/// Does E contain some n0 + B - B with |B| >= threshold? Scans every
/// shift n0 in Z/N and reports the first hit.
inline TranslatedDiffset contains_translated_diffset(const CyclicSubset& E, int threshold,
                                                     long guard = 64) {
    TranslatedDiffset out;
    if (threshold <= 0) {
        out.found = true;  // B empty works for any E
        return out;
    }
    for (long n0 = 0; n0 < E.N; ++n0) {
        CyclicSubset shifted = E.shifted_down(n0);
        if (!shifted.contains(0)) continue;
        CliqueResult res = max_diffset_inside(shifted, guard);
        if (res.size >= threshold) {
            out.found = true;
            out.n0 = n0;
            out.best = std::move(res);
            return out;
        }
    }
    return out;
}

struct ExtremalAudit {
    CyclicSubset A{1, {1}};
    Rat density;
    CyclicSubset popular{1, {1}};
    int threshold = 0;
    std::vector<int> clique_sizes_per_shift;
    bool valid = false;
    long iterations = 0;
};

/// Randomized local search for dense A whose popular difference set
/// P_c(A) contains no translated difference set of size ceil(cN)+1.
/// Deterministic given the seed; the returned audit is an exact recheck.
inline ExtremalAudit extremal_search(long N, const Rat& target_density, const Rat& c,
                                     long budget, std::uint64_t seed) {
    if (budget < 1) throw_invalid("extremal_search: budget must be >= 1");
    if (N < 1) throw_invalid("extremal_search: N must be >= 1");
    Rat cn = c * N;
    int threshold = static_cast<int>(ceil_long(cn)) + 1;

    auto is_valid = [&](const CyclicSubset& A) {
        CyclicSubset P = popular_set(A, c);
        return !contains_translated_diffset(P, threshold).found;
    };

    auto lex_less = [](const CyclicSubset& a, const CyclicSubset& b) {
        return a.members < b.members;
    };

    std::mt19937_64 rng(seed);
    CyclicSubset best = CyclicSubset::empty(N);  // empty set is always valid
    CyclicSubset cur = best;

    // Seed candidate near the target density.
    {
        Rat want = target_density * N;
        long size = std::clamp(floor_long(want + rat(1, 2)), 0L, N);
        CyclicSubset A = CyclicSubset::empty(N);
        long placed = 0;
        while (placed < size) {
            long p = static_cast<long>(rng() % static_cast<std::uint64_t>(N));
            if (!A.members[static_cast<std::size_t>(p)]) {
                A.members[static_cast<std::size_t>(p)] = 1;
                ++placed;
            }
        }
        if (is_valid(A)) cur = A;
        if (cur.count() > best.count()) best = cur;
    }

    long iters = 0;
    for (; iters < budget; ++iters) {
        CyclicSubset trial = cur;
        std::uint64_t roll = rng() % 3;
        long p = static_cast<long>(rng() % static_cast<std::uint64_t>(N));
        if (roll == 0) {
            trial.members[static_cast<std::size_t>(p)] = 1;
        } else if (roll == 1) {
            trial.members[static_cast<std::size_t>(p)] = 0;
        } else {
            long q = static_cast<long>(rng() % static_cast<std::uint64_t>(N));
            std::swap(trial.members[static_cast<std::size_t>(p)],
                      trial.members[static_cast<std::size_t>(q)]);
        }
        if (!is_valid(trial)) continue;
        bool better = trial.count() > cur.count() ||
                      (trial.count() == cur.count() && lex_less(trial, cur));
        if (better) cur = trial;
        if (cur.count() > best.count() ||
            (cur.count() == best.count() && lex_less(cur, best)))
            best = cur;
    }

    ExtremalAudit audit;
    audit.A = best;
    audit.density = Rat(best.count(), N);
    audit.density.canonicalize();
    audit.popular = popular_set(best, c);
    audit.threshold = threshold;
    audit.iterations = iters;
    for (long n0 = 0; n0 < N; ++n0) {
        CyclicSubset shifted = audit.popular.shifted_down(n0);
        audit.clique_sizes_per_shift.push_back(max_diffset_inside(shifted).size);
    }
    audit.valid = true;
    for (int s : audit.clique_sizes_per_shift)
        if (s >= threshold) audit.valid = false;
    return audit;
}

} // namespace recurlab
