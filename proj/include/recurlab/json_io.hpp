#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recurlab/concentration.hpp"
#include "recurlab/integer_sets.hpp"
#include "recurlab/kronecker.hpp"
#include "recurlab/systems.hpp"
#include "recurlab/torus.hpp"

namespace recurlab {

// Insertion-ordered JSON keeps report bytes deterministic.
using Json = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_invalid("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_invalid("cannot write file: " + path);
    out << content;
}

inline Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw_invalid("malformed JSON in " + what);
    return j;
}

inline Json load_json_file(const std::string& path) {
    return parse_json(read_text_file(path), path);
}

// ---- measures -------------------------------------------------------------

inline Json measure_to_json(const AtomicMeasure& sigma) {
    Json atoms = Json::array();
    for (const auto& a : sigma.atoms())
        atoms.push_back(Json{{"x", rat_to_string(a.x.value)}, {"w", rat_to_string(a.w)}});
    return Json{{"atoms", atoms}};
}

inline AtomicMeasure measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
        throw_invalid("measure JSON needs an 'atoms' array");
    std::vector<AtomicMeasure::Atom> atoms;
    for (const auto& a : j["atoms"]) {
        if (!a.contains("x") || !a.contains("w"))
            throw_invalid("measure atom needs 'x' and 'w'");
        atoms.push_back({TorusPoint{rat_from_string(a["x"].get<std::string>())},
                         rat_from_string(a["w"].get<std::string>())});
    }
    return AtomicMeasure::make(std::move(atoms));
}

// ---- Kronecker families ----------------------------------------------------

inline Json family_to_json(const KroneckerFamily& fam) {
    Json j;
    j["b"] = fam.b;
    j["r"] = fam.r;
    j["M"] = fam.M;
    j["seed"] = fam.seed;
    j["atoms"] = measure_to_json(fam.mixture)["atoms"];
    Json blocks = Json::array();
    for (const auto& [m, idxs] : fam.block_atom_indices) {
        Json b{{"m", m}, {"atom_indices", idxs}};
        blocks.push_back(b);
    }
    j["blocks"] = blocks;
    Json target = Json::array();
    for (std::size_t i = 0; i < fam.target.turns.size(); ++i)
        target.push_back(Json{{"atom", i}, {"turn", rat_to_string(fam.target.turns[i].turn)}});
    j["target"] = target;
    return j;
}

/// Families are rebuilt from their parameters and verified against the
/// serialized data, so a corrupted file cannot smuggle in a mismatched
/// mixture or target.
inline KroneckerFamily family_from_json(const Json& j) {
    for (const char* key : {"b", "r", "M", "seed", "atoms", "blocks", "target"})
        if (!j.contains(key)) throw_invalid(std::string("family JSON missing '") + key + "'");
    KroneckerFamily fam = build_family(j["b"].get<long>(), j["r"].get<int>(), j["M"].get<int>(),
                                       j["seed"].get<std::uint64_t>());
    Json expect = family_to_json(fam);
    if (expect["atoms"] != j["atoms"] || expect["target"] != j["target"])
        throw_invalid("family JSON does not match its declared parameters");
    return fam;
}

// ---- integer sets -----------------------------------------------------------

inline Json periodic_to_json(const PeriodicSet& A) {
    return Json{{"periodic", Json{{"N", A.modulus()}, {"residues", A.residues()}}}};
}

inline std::string window_bits_hex(const WindowSet& S) {
    std::string hex;
    const std::size_t n = S.span();
    for (std::size_t byte = 0; byte * 8 < n; ++byte) {
        unsigned v = 0;
        for (std::size_t bit = 0; bit < 8; ++bit) {
            std::size_t i = byte * 8 + bit;
            if (i < n && S.contains(S.lo() + static_cast<long long>(i))) v |= (1u << bit);
        }
        char buf[3];
        std::snprintf(buf, sizeof(buf), "%02x", v);
        hex += buf;
    }
    return hex;
}

inline Json window_to_json(const WindowSet& S) {
    return Json{{"window", Json{{"offset", S.offset()}, {"span", S.span()},
                                {"bits", window_bits_hex(S)}}}};
}

inline Json set_to_json(const PeriodicSet& A) { return periodic_to_json(A); }
inline Json set_to_json(const WindowSet& S) { return window_to_json(S); }

inline PeriodicSet periodic_from_json(const Json& j) {
    if (!j.contains("periodic")) throw_invalid("expected a 'periodic' set object");
    const Json& p = j["periodic"];
    if (!p.contains("N") || !p.contains("residues"))
        throw_invalid("periodic set JSON needs 'N' and 'residues'");
    return PeriodicSet::make(p["N"].get<long>(), p["residues"].get<std::vector<long>>());
}

inline WindowSet window_from_json(const Json& j) {
    if (!j.contains("window")) throw_invalid("expected a 'window' set object");
    const Json& w = j["window"];
    if (!w.contains("offset") || !w.contains("span") || !w.contains("bits"))
        throw_invalid("window set JSON needs 'offset', 'span' and 'bits'");
    long long offset = w["offset"].get<long long>();
    std::size_t span = w["span"].get<std::size_t>();
    const std::string hex = w["bits"].get<std::string>();
    WindowSet out = WindowSet::empty_at(offset);
    for (std::size_t i = 0; i < span; ++i) {
        std::size_t byte = i / 8, bit = i % 8;
        if (byte * 2 + 1 >= hex.size()) break;
        unsigned v = static_cast<unsigned>(std::stoul(hex.substr(byte * 2, 2), nullptr, 16));
        if (v & (1u << bit)) out.insert(offset + static_cast<long long>(i));
    }
    return out;
}

// ---- systems ----------------------------------------------------------------

inline Json system_to_json(const FinitePermSystem& sys, const MarkedSet& D) {
    std::vector<long> d_pts;
    for (std::size_t i = 0; i < D.size(); ++i)
        if (D[i]) d_pts.push_back(static_cast<long>(i));
    return Json{{"size", sys.size()}, {"perm", sys.perm()}, {"D", d_pts}};
}

inline std::pair<FinitePermSystem, MarkedSet> system_from_json(const Json& j) {
    if (!j.contains("size") || !j.contains("perm"))
        throw_invalid("system JSON needs 'size' and 'perm'");
    auto perm = j["perm"].get<std::vector<std::uint32_t>>();
    if (perm.size() != j["size"].get<std::size_t>())
        throw_invalid("system JSON size does not match the permutation");
    FinitePermSystem sys = FinitePermSystem::make(std::move(perm));
    MarkedSet D(sys.size(), 0);
    if (j.contains("D"))
        D = marked_from_points(sys, j["D"].get<std::vector<long>>());
    return {std::move(sys), std::move(D)};
}

inline Json battery_to_json(const Battery& bat) {
    Json out = Json::array();
    for (const auto& inst : bat.instances) {
        Json j = system_to_json(inst.sys, inst.D);
        j["delta"] = rat_to_string(inst.delta);
        j["id"] = inst.id;
        out.push_back(j);
    }
    return out;
}

inline Battery battery_from_json(const Json& j) {
    if (!j.is_array()) throw_invalid("battery JSON must be a list of instances");
    Battery bat;
    std::size_t k = 0;
    for (const auto& item : j) {
        auto [sys, D] = system_from_json(item);
        Rat delta = item.contains("delta") ? rat_from_string(item["delta"].get<std::string>())
                                           : measure_of(sys, D);
        std::string id = item.contains("id") ? item["id"].get<std::string>()
                                             : "instance" + std::to_string(k);
        if (measure_of(sys, D) < delta)
            throw_invalid("battery instance '" + id + "' has mu(D) < delta");
        bat.instances.push_back({std::move(sys), std::move(D), delta, id});
        ++k;
    }
    return bat;
}

inline std::string battery_hash(const Battery& bat) {
    return fnv1a64_hex(battery_to_json(bat).dump());
}

// ---- reports ----------------------------------------------------------------

inline Json concentration_report_to_json(const ConcentrationAuditReport& rep) {
    Json witnesses = Json::array();
    for (const auto& w : rep.witnesses) {
        witnesses.push_back(Json{{"lemma", w.lemma},
                                 {"t", w.t},
                                 {"center", w.center},
                                 {"subset", w.subset_elements},
                                 {"detail", w.detail}});
    }
    return Json{{"k", rep.k},
                {"r", rep.r},
                {"t", rep.ts},
                {"subsets_checked", rep.subsets_checked},
                {"violations", rep.violations},
                {"witnesses", witnesses}};
}

/// CSV sidecar for residual sequences: columns (index, n, residual).
inline std::string residuals_csv(std::span<const long long> ns, std::span<const Real> residuals) {
    std::ostringstream out;
    out << "index,n,residual\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
        out << i << "," << ns[i] << "," << residuals[i].str(18) << "\n";
    return out.str();
}

} // namespace recurlab
