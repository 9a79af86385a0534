#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "recurlab/torus.hpp"

namespace recurlab {

/// Finite digit stage of a constructive Kronecker analogue: r atoms at
/// distinct scale levels, x_i = b^{-i} + shift + delta_i, with all
/// perturbations below b^{-(r+2)} so characters read off target digits.
struct DigitStage {
    long b = 0;
    int r = 0;
    Rat shift;                    // 0 for standalone stages
    std::vector<Rat> deltas;      // indexed by level-1, level in 1..r
    std::string label;
    std::vector<TorusPoint> atoms;  // sorted ascending
    std::vector<int> level_of;      // level of atoms[idx]

    TorusPoint atom_at_level(int level) const {
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (level_of[i] == level) return atoms[i];
        throw_invalid("no atom at requested level");
    }

    AtomicMeasure uniform_measure() const {
        return AtomicMeasure::uniform(atoms);
    }
};

namespace detail {

inline std::vector<Rat> stage_perturbations(long b, int r, std::uint64_t seed,
                                            unsigned denom_exp) {
    std::vector<Rat> deltas(static_cast<std::size_t>(r), rat(0));
    if (seed == 0) return deltas;
    // Engine output used directly (modulo) to stay portable; the standard
    // pins mt19937_64 but not the distributions.
    std::mt19937_64 rng(seed);
    Rat denom = rat_pow(b, denom_exp);
    for (int i = 0; i < r; ++i) {
        long span = 2 * (b - 1) + 1;
        long num = static_cast<long>(rng() % static_cast<std::uint64_t>(span)) - (b - 1);
        deltas[static_cast<std::size_t>(i)] = Rat(num) / denom;
    }
    return deltas;
}

inline DigitStage build_stage_impl(long b, int r, std::uint64_t seed, const Rat& shift,
                                   std::string label) {
    if (b < 4) throw_invalid("digit stage requires base b >= 4");
    if (r < 1) throw_invalid("digit stage requires depth r >= 1");
    checked_ipow(b, static_cast<unsigned>(r));  // size guard for character indices

    DigitStage st;
    st.b = b;
    st.r = r;
    st.shift = shift;
    st.label = std::move(label);
    // Perturbations live at scale b^-(r+4); together with block shifts at
    // scale b^-(r+3) they stay below the b^-(r+2) budget.
    st.deltas = stage_perturbations(b, r, seed, static_cast<unsigned>(r) + 4);

    Rat bound = 1 / rat_pow(b, static_cast<unsigned>(r) + 2);
    std::vector<std::pair<TorusPoint, int>> pts;
    for (int i = 1; i <= r; ++i) {
        Rat total_offset = shift + st.deltas[static_cast<std::size_t>(i - 1)];
        if (abs(total_offset) >= bound)
            throw_construction("stage perturbation exceeds b^-(r+2) budget");
        Rat x = 1 / rat_pow(b, static_cast<unsigned>(i)) + total_offset;
        pts.emplace_back(TorusPoint::reduce(x), i);
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].first == pts[i - 1].first)
            throw_construction("stage atoms collided");
    for (auto& [x, lvl] : pts) {
        st.atoms.push_back(x);
        st.level_of.push_back(lvl);
    }
    return st;
}

} // namespace detail

/// Standalone stage; seed 0 means zero perturbation.
inline DigitStage build_stage(long b, int r, std::uint64_t perturb_seed) {
    return detail::build_stage_impl(b, r, perturb_seed, rat(0), "stage");
}

/// Result of the constructive character approximation on a stage.
struct ApproxCertificate {
    long long n = 0;
    Real sup_error;   // achieved sup of chordal distances over the atoms
    Real bound;       // 2 sin(pi (1/b + r b^-2))
    struct AtomReport {
        int level;
        Rat achieved_turn;
        Rat target_turn;
        Real chord_error;
    };
    std::vector<AtomReport> per_atom;
};

/// Picks n = sum d_i b^(i-1) whose digits track the quantized target,
/// correcting each digit for the carry of already-chosen lower digits.
/// Targets must be multiples of 1/b on every atom (sorted-atom indexing).
inline ApproxCertificate constructive_approximant(const DigitStage& stage,
                                                  const StepFunction& target) {
    const long b = stage.b;
    const int r = stage.r;
    if (target.turns.size() != stage.atoms.size())
        throw_dimension("target not total on stage atoms");

    // Target turn per level, validated as a multiple of 1/b.
    std::vector<Rat> tau(static_cast<std::size_t>(r) + 1);
    for (std::size_t idx = 0; idx < stage.atoms.size(); ++idx) {
        const Rat& t = target.turns[idx].turn;
        Rat scaled = t * b;
        if (!is_integer(scaled))
            throw_invalid("target turn is not a multiple of 1/b");
        tau[static_cast<std::size_t>(stage.level_of[idx])] = t;
    }

    // Greedy digit choice on the ideal lattice x_i = b^-i: at level i the
    // achieved turn is d_i/b + (carry of lower digits); pick the digit
    // minimizing the exact circular distance, preferring the raw read-off
    // digit on ties.
    std::vector<long> digits(static_cast<std::size_t>(r) + 1, 0);
    long long n = 0;
    long long place = 1;
    for (int i = 1; i <= r; ++i) {
        Rat carry = 0;
        for (int j = 1; j < i; ++j)
            carry += Rat(digits[static_cast<std::size_t>(j)]) /
                     rat_pow(b, static_cast<unsigned>(i - j + 1));
        long readoff = floor_long(mod1(tau[static_cast<std::size_t>(i)]) * b);
        long best_d = 0;
        Rat best_dist = rat(1);
        for (long d = 0; d < b; ++d) {
            Rat achieved = Rat(d) / Rat(b) + carry;
            Rat dist = circ_dist_turns(achieved, tau[static_cast<std::size_t>(i)]);
            if (dist < best_dist || (dist == best_dist && d == readoff)) {
                best_dist = dist;
                best_d = d;
            }
        }
        digits[static_cast<std::size_t>(i)] = best_d;
        n += best_d * place;
        place *= b;
    }

    ApproxCertificate cert;
    cert.n = n;
    Rat band = Rat(1, b) + Rat(r) / rat_pow(b, 2);
    band.canonicalize();
    cert.bound = chord_turns(band, rat(0));

    Real sup;
    std::optional<int> violating_level;
    for (std::size_t idx = 0; idx < stage.atoms.size(); ++idx) {
        Rat achieved = character_eval(n, stage.atoms[idx]).turn;
        Rat want = target.turns[idx].turn;
        Real err = chord_turns(achieved, want);
        if (err > sup) sup = err;
        if (err >= cert.bound + Real(1e-9) && !violating_level)
            violating_level = stage.level_of[idx];
        cert.per_atom.push_back({stage.level_of[idx], achieved, want, err});
    }
    cert.sup_error = sup;
    if (violating_level)
        throw_certification("approximant certificate violated at atom level " +
                            std::to_string(*violating_level));
    return cert;
}

/// Exhaustive argmin of ||e_n - target||_{L1(sigma)} over [lo, hi].
/// Ties resolve toward smaller |n|, negative before positive.
inline std::pair<long long, Real> best_character_scan(const AtomicMeasure& sigma,
                                                      const StepFunction& target,
                                                      long long lo, long long hi) {
    if (lo > hi) throw_invalid("best_character_scan: empty range");
    const Real tie(1e-30);
    bool have = false;
    long long best_n = 0;
    Real best_err;
    for (long long n = lo; n <= hi; ++n) {
        Real err = l1_char_distance(sigma, n, target);
        if (!have) {
            have = true;
            best_n = n;
            best_err = err;
            continue;
        }
        Real diff = err - best_err;
        if (diff < -tie) {
            best_n = n;
            best_err = err;
        } else if (abs(diff) <= tie) {
            long long an = n < 0 ? -n : n;
            long long ab = best_n < 0 ? -best_n : best_n;
            if (an < ab || (an == ab && n < best_n)) {
                best_n = n;
                best_err = err;
            }
        }
    }
    return {best_n, best_err};
}

/// Truncated block family of the main construction: stages K_m for
/// |m| <= M, the renormalized mixture sum 2^-|m| sigma_m, and the target
/// step function equal to e_m on block m.
struct KroneckerFamily {
    long b = 0;
    int r = 0;
    int M = 0;
    std::uint64_t seed = 0;
    AtomicMeasure mixture{AtomicMeasure::dirac(TorusPoint{rat(0)})};
    StepFunction target;
    std::vector<int> block_of;  // per mixture atom
    std::map<int, DigitStage> blocks;
    std::map<int, AtomicMeasure> block_measures;
    std::map<int, std::vector<std::size_t>> block_atom_indices;

    /// Normalized mixture weight 2^-|m| / (3 - 2^(1-M)).
    Rat block_weight(int m) const {
        int am = m < 0 ? -m : m;
        if (am > M) throw_invalid("block index beyond family truncation");
        Rat norm = 0;
        for (int j = -M; j <= M; ++j)
            norm += Rat(1) / rat_pow(2, static_cast<unsigned>(j < 0 ? -j : j));
        return (Rat(1) / rat_pow(2, static_cast<unsigned>(am))) / norm;
    }
};

inline KroneckerFamily build_family(long b, int r, int M, std::uint64_t seed) {
    if (M < 0) throw_invalid("family requires M >= 0");
    if (2 * M + 1 > b - 1)
        throw_construction("2M+1 blocks do not fit disjointly in base b");

    KroneckerFamily fam;
    fam.b = b;
    fam.r = r;
    fam.M = M;
    fam.seed = seed;

    Rat norm = 0;
    for (int m = -M; m <= M; ++m)
        norm += Rat(1) / rat_pow(2, static_cast<unsigned>(m < 0 ? -m : m));

    std::vector<AtomicMeasure::Atom> mix_atoms;
    std::vector<std::pair<Rat, int>> atom_blocks;  // (position, m)
    Rat shift_denom = rat_pow(b, static_cast<unsigned>(r) + 3);
    for (int m = -M; m <= M; ++m) {
        Rat shift = Rat(m + M + 1) / shift_denom;
        std::uint64_t sub_seed = seed == 0 ? 0 : mix_seed(seed, static_cast<std::uint64_t>(m + M));
        DigitStage st = detail::build_stage_impl(b, r, sub_seed, shift,
                                                 "block-" + std::to_string(m));
        Rat w = (Rat(1) / rat_pow(2, static_cast<unsigned>(m < 0 ? -m : m))) / norm / Rat(r);
        for (const auto& x : st.atoms) {
            mix_atoms.push_back({x, w});
            atom_blocks.emplace_back(x.value, m);
        }
        fam.block_measures.emplace(m, st.uniform_measure());
        fam.blocks.emplace(m, std::move(st));
    }

    std::sort(atom_blocks.begin(), atom_blocks.end());
    for (std::size_t i = 1; i < atom_blocks.size(); ++i)
        if (atom_blocks[i].first == atom_blocks[i - 1].first)
            throw_construction("atoms collided across family blocks");

    fam.mixture = AtomicMeasure::make(std::move(mix_atoms));
    fam.block_of.resize(fam.mixture.size());
    fam.target.turns.resize(fam.mixture.size());
    for (std::size_t i = 0; i < fam.mixture.size(); ++i) {
        const Rat& x = fam.mixture.atoms()[i].x.value;
        int m = atom_blocks[i].second;  // same sorted order
        fam.block_of[i] = m;
        fam.block_atom_indices[m].push_back(i);
        fam.target.turns[i] = character_eval(m, TorusPoint{x});
    }
    return fam;
}

/// Partition of atom indices into r cells of exact weight 1/r.
struct EqualPartition {
    int r = 0;
    std::vector<std::vector<std::size_t>> cells;
};

/// Greedy contiguous packing; errors when the weights cannot hit 1/r
/// exactly cell by cell.
inline EqualPartition equal_partition(const AtomicMeasure& sigma, int r) {
    if (r < 1) throw_invalid("partition requires r >= 1");
    EqualPartition part;
    part.r = r;
    Rat cell_target(1, r);
    cell_target.canonicalize();
    std::vector<std::size_t> cur;
    Rat acc = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        acc += sigma.atoms()[i].w;
        cur.push_back(i);
        if (acc == cell_target) {
            part.cells.push_back(std::move(cur));
            cur.clear();
            acc = 0;
        } else if (acc > cell_target) {
            throw_invalid("weights do not pack into cells of exact weight 1/r");
        }
    }
    if (!cur.empty() || part.cells.size() != static_cast<std::size_t>(r))
        throw_invalid("weights do not pack into cells of exact weight 1/r");
    return part;
}

} // namespace recurlab
