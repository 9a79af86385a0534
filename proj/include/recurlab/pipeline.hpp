#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recurlab/concentration.hpp"
#include "recurlab/integer_sets.hpp"
#include "recurlab/kronecker.hpp"
#include "recurlab/parallel.hpp"
#include "recurlab/systems.hpp"
#include "recurlab/torus.hpp"

namespace recurlab {

/// Descending chain S_j = {n : ||e_n - f||_L1(sigma) < eps_j} over a
/// symmetric window, driven by a Kronecker family's mixture and target.
struct ChainSpec {
    KroneckerFamily family;
    std::vector<Rat> thresholds;  // strictly decreasing, default 1/j
    long long window = 1000;      // scans [-window, window]

    static ChainSpec with_default_thresholds(KroneckerFamily fam, int stages, long long window) {
        ChainSpec spec;
        spec.family = std::move(fam);
        for (int j = 1; j <= stages; ++j) spec.thresholds.push_back(rat(1, j));
        spec.window = window;
        return spec;
    }

    void validate() const {
        if (thresholds.empty()) throw_invalid("chain needs at least one threshold");
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (thresholds[i] <= 0) throw_invalid("thresholds must be positive");
            if (i > 0 && thresholds[i] >= thresholds[i - 1])
                throw_invalid("thresholds must be strictly decreasing");
        }
        if (window < 0) throw_invalid("window must be nonnegative");
    }
};

namespace detail {

/// ||e_n - f||_L1(sigma) for every n in [lo, hi], window-partitioned
/// across workers, merged in index order.
inline std::vector<Real> distance_sweep(const AtomicMeasure& sigma, const StepFunction& f,
                                        long long lo, long long hi, unsigned workers) {
    if (lo > hi) throw_invalid("distance sweep: empty window");
    std::size_t total = static_cast<std::size_t>(hi - lo + 1);
    std::vector<Real> dists(total);
    parallel_chunks(total, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i)
            dists[i] = l1_char_distance(sigma, lo + static_cast<long long>(i), f);
    });
    return dists;
}

inline void classify_threshold(const std::vector<Real>& dists, long long lo, const Rat& eps,
                               double guard_band, std::vector<long long>& members,
                               std::vector<long long>& boundary) {
    Real eps_r(eps);
    Real band(guard_band);
    for (std::size_t i = 0; i < dists.size(); ++i) {
        long long n = lo + static_cast<long long>(i);
        if (dists[i] < eps_r) members.push_back(n);
        if (abs(dists[i] - eps_r) <= band) boundary.push_back(n);
    }
}

/// Stage enumeration order: |n| ascending, negative before positive.
inline void sort_by_magnitude(std::vector<long long>& v) {
    std::sort(v.begin(), v.end(), [](long long a, long long b) {
        long long aa = a < 0 ? -a : a, ab = b < 0 ? -b : b;
        return aa != ab ? aa < ab : a < b;
    });
}

} // namespace detail

struct ScanResult {
    WindowSet S;
    std::vector<long long> members;   // ascending
    std::vector<long long> boundary;  // |dist - eps| within the guard band
};

/// S_eps = {n in window : ||e_n - 1||_L1(sigma) < eps}. Values within the
/// guard band of the threshold are flagged, never silently reclassified.
inline ScanResult compute_S_eps(const AtomicMeasure& sigma, const Rat& eps, long long lo,
                                long long hi, double guard_band = 1e-9, unsigned workers = 1) {
    if (eps <= 0) throw_invalid("compute_S_eps: eps must be positive");
    StepFunction one = StepFunction::constant(sigma.size(), UnimodularValue{rat(0)});
    auto dists = detail::distance_sweep(sigma, one, lo, hi, workers);
    ScanResult out;
    detail::classify_threshold(dists, lo, eps, guard_band, out.members, out.boundary);
    out.S = out.members.empty() ? WindowSet::empty_at(lo)
                                : WindowSet::from_elements(out.members);
    return out;
}

struct QResult {
    WindowSet Q;
    std::vector<long long> members;
    std::vector<long long> boundary;
    /// Character with ||f - e_m|| < eps/2, giving the containment
    /// Q_{eps,f} >= {n : ||e_n - e_m|| < eps/2}; absent when no such m
    /// lies in the window.
    std::optional<long long> reduction_witness;
};

/// Q_{eps,f} = {n in window : ||e_n - f||_L1(sigma) < eps}.
inline QResult compute_Q(const AtomicMeasure& sigma, const StepFunction& f, const Rat& eps,
                         long long lo, long long hi, double guard_band = 1e-9,
                         unsigned workers = 1) {
    if (eps <= 0) throw_invalid("compute_Q: eps must be positive");
    f.check_total(sigma);
    auto dists = detail::distance_sweep(sigma, f, lo, hi, workers);
    QResult out;
    detail::classify_threshold(dists, lo, eps, guard_band, out.members, out.boundary);
    out.Q = out.members.empty() ? WindowSet::empty_at(lo)
                                : WindowSet::from_elements(out.members);
    // Reduction witness: the same sweep values are ||e_m - f||, so scan
    // them in |m|-order for one below eps/2.
    Real half(eps / 2);
    std::vector<long long> all(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) all[i] = lo + static_cast<long long>(i);
    detail::sort_by_magnitude(all);
    for (long long m : all) {
        if (dists[static_cast<std::size_t>(m - lo)] < half) {
            out.reduction_witness = m;
            break;
        }
    }
    return out;
}

struct StageRecord {
    int j = 0;
    Rat epsilon;
    std::vector<long long> scanned;    // S_j within the window, |n|-order
    std::vector<long long> selected;   // S_j'
    std::vector<long long> boundary;
    std::map<long long, CertifyOutcome> certificates;  // per translate m
    bool ok = false;
    std::string diagnostic;
};

/// Window-truncated diagonal set S = union_j S_j' with battery
/// certificates per stage and translate.
struct DiagonalResult {
    std::vector<long long> enumeration;  // stage-major, |n| asc, neg first
    std::vector<int> stage_of;           // admission stage per element
    std::vector<StageRecord> stages;
    WindowSet S;
};

/// Builds S_j' as the shortest certified prefix of the scanned stage
/// members: every translate S_j' + m, |m| <= j, must be a battery
/// certificate at delta = 1/j (more precisely delta = eps_j). Stages that
/// cannot certify are skipped with a diagnostic.
inline DiagonalResult diagonalize(const ChainSpec& chain, const Battery& battery,
                                  double guard_band = 1e-9, unsigned workers = 1) {
    chain.validate();
    const AtomicMeasure& sigma = chain.family.mixture;
    const StepFunction& f = chain.family.target;
    const long long lo = -chain.window, hi = chain.window;
    // One sweep serves every stage: thresholds only reclassify it.
    auto dists = detail::distance_sweep(sigma, f, lo, hi, workers);

    DiagonalResult result;
    std::vector<long long> admitted;  // for dedup across stages

    for (std::size_t ji = 0; ji < chain.thresholds.size(); ++ji) {
        StageRecord stage;
        stage.j = static_cast<int>(ji + 1);
        stage.epsilon = chain.thresholds[ji];
        std::vector<long long> members;
        detail::classify_threshold(dists, lo, stage.epsilon, guard_band, members,
                                   stage.boundary);
        detail::sort_by_magnitude(members);
        stage.scanned = members;

        const Rat delta = stage.epsilon;
        bool certified = false;
        for (std::size_t len = 1; len <= members.size() && !certified; len *= 2) {
            std::size_t take = std::min(len, members.size());
            std::span<const long long> prefix(members.data(), take);
            bool all_ok = true;
            std::map<long long, CertifyOutcome> certs;
            for (long long m = -stage.j; m <= stage.j && all_ok; ++m) {
                std::vector<long long> translated(prefix.begin(), prefix.end());
                for (auto& n : translated) n += m;
                CertifyOutcome oc = delta_recurrence_certify(translated, battery, delta);
                if (!oc.certified) all_ok = false;
                certs.emplace(m, std::move(oc));
            }
            if (all_ok) {
                certified = true;
                stage.selected.assign(prefix.begin(), prefix.end());
                stage.certificates = std::move(certs);
            } else if (take == members.size()) {
                break;  // full piece failed
            }
        }
        stage.ok = certified;
        if (!certified) {
            // Reconstruct the failing certificate for the diagnostic.
            std::string why = members.empty() ? "stage piece is empty" : "no certified prefix";
            for (long long m = -stage.j; m <= stage.j; ++m) {
                std::vector<long long> translated(members.begin(), members.end());
                for (auto& n : translated) n += m;
                CertifyOutcome oc = delta_recurrence_certify(translated, battery, delta);
                if (!oc.certified && oc.failing_id) {
                    why = "translate m=" + std::to_string(m) + " failed on instance " +
                          *oc.failing_id;
                    break;
                }
            }
            stage.diagnostic = why;
            result.stages.push_back(std::move(stage));
            continue;
        }
        for (long long n : stage.selected) {
            if (std::find(admitted.begin(), admitted.end(), n) != admitted.end()) continue;
            admitted.push_back(n);
            result.enumeration.push_back(n);
            result.stage_of.push_back(stage.j);
        }
        result.stages.push_back(std::move(stage));
    }

    result.S = result.enumeration.empty()
                   ? WindowSet::empty_at(0)
                   : WindowSet::from_elements(result.enumeration);
    return result;
}

struct RigidityEntry {
    long long n = 0;
    int deepest_stage = 0;  // largest j with n in the scanned S_j
    Real residual;          // ||e_n - e_m||_L1(sigma_m)
    Real bound;             // eps_j / blockweight(m) at the deepest stage
    bool ok = false;
};

struct RigidityReport {
    int m = 0;
    std::vector<RigidityEntry> entries;  // along the enumeration order
    bool all_ok = false;
};

/// Residuals ||e_{s_n} - e_m||_{L1(sigma_m)} along the enumeration.
/// Stage membership ||e_n - f||_{L1(sigma)} < eps_j forces the residual
/// below eps_j / w_m, which is asserted for every stage containing n.
inline RigidityReport verify_rigidity_per_translate(const DiagonalResult& result,
                                                    const ChainSpec& chain, int m) {
    if (m < -chain.family.M || m > chain.family.M)
        throw_invalid("translate outside the family truncation");
    const AtomicMeasure& sigma_m = chain.family.block_measures.at(m);
    StepFunction em = StepFunction::character(sigma_m, m);
    Rat w = chain.family.block_weight(m);

    RigidityReport rep;
    rep.m = m;
    rep.all_ok = true;
    const AtomicMeasure& sigma = chain.family.mixture;
    const StepFunction& f = chain.family.target;
    for (long long n : result.enumeration) {
        RigidityEntry e;
        e.n = n;
        e.residual = l1_char_distance(sigma_m, n, em);
        Real full_dist = l1_char_distance(sigma, n, f);
        e.ok = true;
        for (const auto& stage : result.stages) {
            if (!(full_dist < Real(stage.epsilon))) continue;  // n not in S_j
            e.deepest_stage = stage.j;
            e.bound = Real(stage.epsilon / w);
            if (!(e.residual < e.bound)) e.ok = false;
        }
        if (!e.ok) rep.all_ok = false;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

/// Configuration of the empirical (R1)-(R5) classifier.
struct HierarchyConfig {
    std::vector<Rat> alpha_rational{rat(1, 2), rat(1, 3), rat(2, 3), rat(1, 4), rat(3, 4),
                                    rat(1, 5)};
    bool include_irrational = true;  // sqrt(2) and the golden ratio
    int translate_range = 3;
    double weyl_tol = 0.1;
    double r2_slack = 0.05;
    std::vector<BohrProxy> proxies;

    static std::vector<BohrProxy> default_proxies() {
        std::vector<BohrProxy> out;
        BohrProxy p1;
        p1.freqs.push_back(BohrFrequency::rational(rat(1, 2), 0.9, 0.1));
        out.push_back(p1);
        BohrProxy p2;
        p2.freqs.push_back(BohrFrequency::rational(rat(1, 3), 0.9, 0.1));
        out.push_back(p2);
        BohrProxy p3;
        p3.freqs.push_back(BohrFrequency::irrational(sqrt(Real(2L)), 0.49, 0.51));
        out.push_back(p3);
        BohrProxy p4;  // finite intersection of two subbase sets
        p4.freqs.push_back(BohrFrequency::rational(rat(1, 2), 0.9, 0.1));
        p4.freqs.push_back(BohrFrequency::rational(rat(1, 3), 0.9, 0.1));
        out.push_back(p4);
        return out;
    }

    static HierarchyConfig defaults() {
        HierarchyConfig cfg;
        cfg.proxies = default_proxies();
        return cfg;
    }
};

struct HierarchyReport {
    bool r1 = false, r2 = false, r3 = false, r4 = false, r5 = false;

    struct WeylEntry {
        std::string alpha;
        std::size_t prefix = 0;
        double magnitude = 0;
    };
    std::vector<WeylEntry> r1_evidence;

    struct InstanceEntry {
        std::string id;
        long long m = 0;
        bool pass = false;
        std::string detail;
    };
    std::vector<InstanceEntry> r2_evidence, r3_evidence, r4_evidence;

    struct ProxyEntry {
        std::size_t proxy = 0;
        long long m = 0;
        bool hit = false;
        long long witness = 0;
    };
    std::vector<ProxyEntry> r5_evidence;

    // Flags are evidence over a finite window and battery, never claims
    // about the infinite objects.
    std::string label = "empirical, window-limited";
};

/// Empirical flags for the recurrence hierarchy on an enumerated finite
/// piece of S: equidistribution, optimal/strong/plain recurrence per
/// translate against the battery, and Bohr-proxy hits.
inline HierarchyReport hierarchy_classify(std::span<const long long> S, const Battery& battery,
                                          const HierarchyConfig& cfg = HierarchyConfig::defaults()) {
    if (S.empty()) throw_invalid("hierarchy_classify: empty set");
    HierarchyReport rep;

    // (R1) Weyl sums over nested prefixes of the enumeration.
    const std::size_t prefixes[3] = {std::max<std::size_t>(1, S.size() / 4),
                                     std::max<std::size_t>(1, S.size() / 2), S.size()};
    rep.r1 = true;
    auto record_weyl = [&](const std::string& name, const Real& mag, std::size_t pref) {
        rep.r1_evidence.push_back({name, pref, mag.to_double()});
        if (pref == S.size() && !(mag < cfg.weyl_tol)) rep.r1 = false;
    };
    for (const auto& a : cfg.alpha_rational) {
        for (std::size_t p : prefixes)
            record_weyl(rat_to_string(a), weyl_sum(S.subspan(0, p), a), p);
    }
    if (cfg.include_irrational) {
        const Real irr[2] = {sqrt(Real(2L)), (sqrt(Real(5L)) + Real(1L)) / Real(2L)};
        const char* names[2] = {"sqrt2", "golden"};
        for (int i = 0; i < 2; ++i)
            for (std::size_t p : prefixes)
                record_weyl(names[i], weyl_sum(S.subspan(0, p), irr[i]), p);
    }

    // Translated copies used by (R2)-(R5).
    auto translated = [&](long long m) {
        std::vector<long long> t(S.begin(), S.end());
        for (auto& n : t) n += m;
        return t;
    };

    rep.r2 = rep.r3 = rep.r4 = true;
    for (const auto& inst : battery.instances) {
        Rat mu = measure_of(inst.sys, inst.D);
        Rat mu2 = mu * mu;
        for (long long m = -cfg.translate_range; m <= cfg.translate_range; ++m) {
            auto t = translated(m);
            OptimalAverage avg = optimal_recurrence_average(t, inst.sys, inst.D);
            bool p2 = Real(avg.average) >= Real(mu2) - Real(cfg.r2_slack);
            rep.r2_evidence.push_back({inst.id, m, p2,
                                       "avg=" + rat_to_string(avg.average) +
                                           " mu2=" + rat_to_string(mu2)});
            if (!p2) rep.r2 = false;

            ProfileReport prof = strong_recurrence_profile(S, inst.sys, inst.D, m);
            bool p3 = prof.tail_sup > 0;
            rep.r3_evidence.push_back({inst.id, m, p3,
                                       "tail_sup=" + rat_to_string(prof.tail_sup)});
            if (!p3) rep.r3 = false;

            auto w = recurrence_witness(t, inst.sys, inst.D);
            rep.r4_evidence.push_back({inst.id, m, w.has_value(),
                                       w ? "witness=" + std::to_string(*w) : "no witness"});
            if (!w) rep.r4 = false;
        }
    }

    // (R5) Bohr proxy hits on every translate.
    rep.r5 = true;
    for (std::size_t pi = 0; pi < cfg.proxies.size(); ++pi) {
        for (long long m = -cfg.translate_range; m <= cfg.translate_range; ++m) {
            auto t = translated(m);
            BohrHit hit = bohr_hit_test(WindowSet::from_elements(t), cfg.proxies[pi]);
            rep.r5_evidence.push_back({pi, m, hit.hit, hit.witness});
            if (!hit.hit) rep.r5 = false;
        }
    }
    return rep;
}

} // namespace recurlab
