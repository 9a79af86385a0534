#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "recurlab/errors.hpp"
#include "recurlab/rational.hpp"
#include "recurlab/real.hpp"

namespace recurlab {

/// Point of the torus [0,1), stored as an exact rational in lowest terms.
struct TorusPoint {
    Rat value;

    static TorusPoint reduce(const Rat& q) { return TorusPoint{mod1(q)}; }

    friend bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.value == b.value; }
    friend bool operator<(const TorusPoint& a, const TorusPoint& b) { return a.value < b.value; }
};

/// A point exp(2*pi*i*turn) of the unit circle, held as its rational turn.
struct UnimodularValue {
    Rat turn;

    static UnimodularValue reduce(const Rat& q) { return UnimodularValue{mod1(q)}; }

    friend bool operator==(const UnimodularValue& a, const UnimodularValue& b) {
        return a.turn == b.turn;
    }
};

/// Finite atomic probability measure on the torus: positive rational
/// weights summing to exactly 1 on strictly increasing points.
class AtomicMeasure {
public:
    struct Atom {
        TorusPoint x;
        Rat w;
    };

    static AtomicMeasure make(std::vector<Atom> atoms) {
        if (atoms.empty()) throw_invalid("measure needs at least one atom");
        for (auto& a : atoms) {
            a.x.value.canonicalize();  // lowest terms, so equality is exact
            a.w.canonicalize();
        }
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.x < b.x; });
        Rat total = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].x.value < 0 || atoms[i].x.value >= 1)
                throw_invalid("atom outside [0,1)");
            if (atoms[i].w <= 0) throw_invalid("atom weight must be positive");
            if (i > 0 && atoms[i].x == atoms[i - 1].x)
                throw_invalid("duplicate atom position");
            total += atoms[i].w;
        }
        if (total != 1) throw_invalid("atom weights must sum to exactly 1");
        AtomicMeasure m;
        m.atoms_ = std::move(atoms);
        return m;
    }

    static AtomicMeasure dirac(const TorusPoint& x) {
        return make({Atom{x, rat(1)}});
    }

    static AtomicMeasure uniform(std::vector<TorusPoint> pts) {
        std::vector<Atom> atoms;
        atoms.reserve(pts.size());
        Rat w(1, static_cast<long>(pts.size() == 0 ? 1 : pts.size()));
        w.canonicalize();
        for (auto& p : pts) atoms.push_back(Atom{p, w});
        return make(std::move(atoms));
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    /// Largest atom weight: the "continuity defect" of a finite stage
    /// standing in for a continuous measure.
    Rat max_atom_weight() const {
        Rat m = 0;
        for (const auto& a : atoms_)
            if (a.w > m) m = a.w;
        return m;
    }

private:
    AtomicMeasure() = default;
    std::vector<Atom> atoms_;
};

/// Unimodular step function: one circle value per atom of a measure.
/// Turns are rational so equality tests stay exact.
struct StepFunction {
    std::vector<UnimodularValue> turns;

    static StepFunction constant(std::size_t n, const UnimodularValue& v) {
        StepFunction f;
        f.turns.assign(n, UnimodularValue::reduce(v.turn));
        return f;
    }

    /// The character e_m restricted to the atoms of sigma.
    static StepFunction character(const AtomicMeasure& sigma, long long m);

    void check_total(const AtomicMeasure& sigma) const {
        if (turns.size() != sigma.size())
            throw_dimension("step function not total on the measure's atoms");
    }
};

/// e_n(x) as an exact turn: (n*x) mod 1.
inline UnimodularValue character_eval(long long n, const TorusPoint& x) {
    static_assert(sizeof(long) == sizeof(long long), "LP64 assumed");
    return UnimodularValue{mod1(x.value * Rat(static_cast<long>(n)))};
}

inline StepFunction StepFunction::character(const AtomicMeasure& sigma, long long m) {
    StepFunction f;
    f.turns.reserve(sigma.size());
    for (const auto& a : sigma.atoms()) f.turns.push_back(character_eval(m, a.x));
    return f;
}

struct Complex2 {
    Real re, im;

    Real abs() const { return sqrt(re * re + im * im); }
};

/// Fourier coefficient sigma_hat(n) = sum_j w_j e(n x_j).
/// Quarter-turn atoms accumulate exactly in rational arithmetic, so e.g.
/// sigma_hat(0) = 1 holds with equality; everything else is 128-bit with
/// error far below 1e-12.
inline Complex2 fourier(const AtomicMeasure& sigma, long long n) {
    Rat re_exact = 0, im_exact = 0;
    Real re_f, im_f;
    for (const auto& a : sigma.atoms()) {
        Rat t = character_eval(n, a.x).turn;
        if (auto ex = unit_exact(t)) {
            re_exact += a.w * ex->first;
            im_exact += a.w * ex->second;
        } else {
            auto [c, s] = unit_circle(t);
            Real w(a.w);
            re_f += w * c;
            im_f += w * s;
        }
    }
    return Complex2{Real(re_exact) + re_f, Real(im_exact) + im_f};
}

/// L1 distance between the character e_n and a step function f on sigma:
/// sum_j w_j |e(n x_j) - e(f_j)|. Chord terms at circular distance 0 or
/// 1/2 accumulate exactly.
inline Real l1_char_distance(const AtomicMeasure& sigma, long long n, const StepFunction& f) {
    f.check_total(sigma);
    Rat exact = 0;
    Real approx;
    const auto& atoms = sigma.atoms();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        Rat t = character_eval(n, atoms[j].x).turn;
        if (auto c = chord_exact(t, f.turns[j].turn)) {
            exact += atoms[j].w * *c;
        } else {
            approx += Real(atoms[j].w) * chord_turns(t, f.turns[j].turn);
        }
    }
    return Real(exact) + approx;
}

/// L1 distance between two step functions on the same measure.
inline Real l1_step_distance(const AtomicMeasure& sigma, const StepFunction& f,
                             const StepFunction& g) {
    f.check_total(sigma);
    g.check_total(sigma);
    Rat exact = 0;
    Real approx;
    const auto& atoms = sigma.atoms();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        if (auto c = chord_exact(f.turns[j].turn, g.turns[j].turn)) {
            exact += atoms[j].w * *c;
        } else {
            approx += Real(atoms[j].w) * chord_turns(f.turns[j].turn, g.turns[j].turn);
        }
    }
    return Real(exact) + approx;
}

/// Residual sequence r_i = ||e_{s_i} - target||_{L1(sigma)} along an
/// enumeration S. The caller inspects tails / monotone envelopes.
inline std::vector<Real> rigidity_defect(const AtomicMeasure& sigma,
                                         std::span<const long long> S,
                                         const StepFunction& target) {
    if (S.empty()) throw_invalid("rigidity_defect: empty enumeration");
    std::vector<Real> out;
    out.reserve(S.size());
    for (long long s : S) out.push_back(l1_char_distance(sigma, s, target));
    return out;
}

} // namespace recurlab
