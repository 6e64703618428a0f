#pragma once

// JSON documents emitted and read by the command-line tool. Every top-level
// document carries "schema": "equibox/1".

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "equibox/certifier.hpp"
#include "equibox/measures.hpp"
#include "equibox/repdecomp.hpp"
#include "equibox/solver.hpp"

namespace equibox {

inline constexpr const char* kSchema = "equibox/1";

inline nlohmann::json config_to_json(const Configuration& c) {
    return {{"u", c.u},
            {"extra_dirs", c.extra_dirs},
            {"parallel_offsets", c.parallel_offsets},
            {"extra_offsets", c.extra_offsets}};
}

/// Accepts either a bare configuration object or a document with a "config" member.
inline Configuration config_from_json(const nlohmann::json& j) {
    const nlohmann::json& c = j.contains("config") ? j.at("config") : j;
    try {
        Configuration cfg;
        cfg.u = c.at("u").get<Vec>();
        cfg.extra_dirs = c.at("extra_dirs").get<std::vector<Vec>>();
        cfg.parallel_offsets = c.at("parallel_offsets").get<Vec>();
        cfg.extra_offsets = c.at("extra_offsets").get<Vec>();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("configuration JSON: ") + e.what());
    }
}

inline nlohmann::json solve_report_to_json(const SolveReport& r) {
    return {{"schema", kSchema},
            {"kind", "solve"},
            {"status", to_string(r.status)},
            {"m", r.m},
            {"l", r.l},
            {"d", r.d},
            {"tol", r.tol},
            {"seed", r.seed},
            {"restarts_used", r.restarts_used},
            {"evaluations", r.evaluations},
            {"residual_max", r.residual_max},
            {"residual_l2", r.residual_l2},
            {"certified", r.certified},
            {"regime", r.certified ? "certified" : "uncertified"},
            {"degenerate", r.degenerate},
            {"notes", r.notes},
            {"config", config_to_json(r.config)}};
}

inline nlohmann::json verify_report_to_json(const VerifyReport& r) {
    nlohmann::json boxes = nlohmann::json::array();
    for (std::size_t i = 0; i < r.masses.masses.size(); ++i) {
        const BoxIndex b = box_at(i, r.masses.m);
        boxes.push_back({{"slab", b.slab}, {"signs", b.signs}, {"mass", r.masses.masses[i]}});
    }
    return {{"schema", kSchema},
            {"kind", "verify"},
            {"result", r.pass ? "PASS" : "FAIL"},
            {"target", r.target},
            {"max_deviation", r.max_deviation},
            {"tol", r.tol},
            {"warnings", r.warnings},
            {"boxes", boxes}};
}

inline nlohmann::json certificate_to_json(const Certificate& c) {
    nlohmann::json j{{"schema", kSchema},
                     {"kind", "certify"},
                     {"m", c.problem.m},
                     {"l", c.problem.l},
                     {"d", c.problem.d.value_or(0)},
                     {"boxes", c.problem.box_count()},
                     {"verdict", to_string(c.verdict)},
                     {"criterion_terms", c.criterion.size()},
                     {"warnings", c.warnings}};
    j["witness"] = c.witness ? nlohmann::json(c.witness->to_string()) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json table_to_json(unsigned m, const std::vector<TableRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back({{"l", r.l}, {"d", r.d}});
    return {{"schema", kSchema}, {"kind", "table"}, {"m", m}, {"rows", arr}};
}

inline nlohmann::json character_table_to_json(const CharacterTable& t) {
    nlohmann::json chars = nlohmann::json::array();
    for (const auto& [chi, mult] : t.multiplicities)
        chars.push_back({{"character", character_name(chi, t.m)}, {"mask", chi}, {"multiplicity", mult}});
    return {{"m", t.m}, {"total_dim", t.total_dim}, {"characters", chars}};
}

} // namespace equibox
