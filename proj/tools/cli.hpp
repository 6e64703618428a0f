#pragma once

// equibox command-line front end. run() is separate from main() so the test
// suite can drive every subcommand in-process.
//
// Exit codes: 0 success / CERTIFIED / CONVERGED / PASS / MATCH,
//             2 INCONCLUSIVE / NOT_CONVERGED / FAIL / MISMATCH,
//             1 usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "equibox/equibox.hpp"

namespace equibox::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNegative = 2;

namespace detail {

inline std::string short_poly(const PolyGF2& p, std::size_t max_terms = 48) {
    if (p.size() <= max_terms) return p.to_string();
    return "<" + std::to_string(p.size()) + " terms>";
}

inline std::string range_label(const TableGroup& g) {
    if (g.l_first == g.l_last) return std::to_string(g.l_first);
    return std::to_string(g.l_first) + " - " + std::to_string(g.l_last);
}

inline void print_markdown_table(std::ostream& out, unsigned m, const std::vector<TableRow>& rows) {
    const auto groups = group_table(rows);
    out << "| l |";
    for (const auto& g : groups) out << ' ' << range_label(g) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < groups.size(); ++i) out << "---|";
    out << "\n| d |";
    for (const auto& g : groups) out << ' ' << g.d << " |";
    out << '\n';
    if (m == 2) {
        out << "\nNote: with m = 2 an even number 2k of parallel hyperplanes needs the same dimension "
               "as 2k - 1, so R^(k+1) is split into 4k + 2 boxes.\n";
    }
}

inline void print_masses(std::ostream& out, const BoxMassTensor& t) {
    for (std::size_t i = 0; i < t.masses.size(); ++i) {
        const BoxIndex b = box_at(i, t.m);
        out << "  slab " << b.slab << " signs ";
        for (unsigned j = 0; j + 1 < t.m; ++j) out << ((b.signs >> j) & 1u);
        char buf[64];
        std::snprintf(buf, sizeof buf, "  %.12f", t.masses[i]);
        out << buf << '\n';
    }
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"equibox: equipartitions of a mass in boxes", "equibox"};
    app.require_subcommand(1);
    app.fallthrough();
    bool json = false;
    app.add_flag("--json", json, "Machine-readable JSON output");

    // dickson
    unsigned dk_m = 3;
    std::string dk_form = "product";
    auto* dickson = app.add_subcommand("dickson", "Dickson polynomial over GF(2)");
    dickson->add_option("--m", dk_m, "Number of variables (1-6)")->required();
    dickson->add_option("--form", dk_form, "product | moore | determinant")
        ->check(CLI::IsMember({"product", "moore", "determinant"}));

    // certify
    unsigned c_m = 3, c_l = 2, c_d = 4;
    auto* certify_cmd = app.add_subcommand("certify", "Decide the algebraic criterion for (m, l, d)");
    certify_cmd->add_option("--m", c_m, "Directions: one parallel family plus m-1 hyperplanes")->required();
    certify_cmd->add_option("--l", c_l, "Parallel hyperplanes")->required();
    certify_cmd->add_option("--d", c_d, "Ambient dimension")->required();

    // min-d
    unsigned md_m = 3, md_l = 2;
    auto* mind = app.add_subcommand("min-d", "Smallest certified dimension");
    mind->add_option("--m", md_m, "Directions")->required();
    mind->add_option("--l", md_l, "Parallel hyperplanes")->required();

    // table
    unsigned t_m = 3, t_lmax = 22;
    std::string t_format = "markdown";
    auto* table = app.add_subcommand("table", "Minimal dimension for l = 2..l-max");
    table->add_option("--m", t_m, "Directions")->required();
    table->add_option("--l-max", t_lmax, "Largest l")->required();
    table->add_option("--format", t_format, "json | csv | markdown")->check(CLI::IsMember({"json", "csv", "markdown"}));

    // decompose
    unsigned r_m = 3, r_l = 2;
    auto* decompose = app.add_subcommand("decompose", "Character decomposition of the test space");
    decompose->add_option("--m", r_m, "Directions")->required();
    decompose->add_option("--l", r_l, "Parallel hyperplanes")->required();

    // gen-measure
    std::string g_kind = "gaussian-mixture", g_out;
    std::size_t g_d = 2, g_components = 3, g_n = 1000;
    std::uint64_t g_seed = 1;
    auto* gen = app.add_subcommand("gen-measure", "Write a seeded synthetic measure");
    gen->add_option("--kind", g_kind, "gaussian-mixture (CSV cloud) | gaussian-mixture-grid | gaussian-grid (JSON grid)")
        ->check(CLI::IsMember({"gaussian-mixture", "gaussian-mixture-grid", "gaussian-grid"}));
    gen->add_option("--d", g_d, "Dimension")->required();
    gen->add_option("--components", g_components, "Mixture components");
    gen->add_option("--n", g_n, "Points (cloud) or cells per axis (grid)");
    gen->add_option("--seed", g_seed, "Random seed");
    gen->add_option("--out", g_out, "Output file (default: standard output)");

    // solve
    std::string s_input;
    unsigned s_l = 2, s_m = 2;
    SolveOptions s_opts;
    std::optional<double> s_tol;
    auto* solve = app.add_subcommand("solve", "Search for an equipartition of a measure");
    solve->add_option("--input", s_input, "Measure file (.csv point cloud or .json grid)")->required();
    solve->add_option("--l", s_l, "Parallel hyperplanes")->required();
    solve->add_option("--m", s_m, "Directions")->required();
    solve->add_option("--tol", s_tol, "Acceptance tolerance on max |box mass - target|");
    solve->add_option("--seed", s_opts.seed, "Random seed");
    solve->add_option("--restarts", s_opts.max_restarts, "Maximum restarts");
    solve->add_option("--coarse-grid", s_opts.coarse_grid, "Angle samples per direction for seeding (d = 2)");
    solve->add_option("--max-evals", s_opts.max_evals, "Evaluations per restart (0 = automatic)");

    // verify
    std::string v_input, v_config;
    double v_tol = 1e-4;
    auto* verify = app.add_subcommand("verify", "Recompute box masses of a stored configuration");
    verify->add_option("--input", v_input, "Measure file")->required();
    verify->add_option("--config", v_config, "Configuration or solve report JSON")->required();
    verify->add_option("--tol", v_tol, "Tolerance on max |box mass - target|");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (dickson->parsed()) {
            const PolyGF2 p = dk_form == "product" ? dickson_product(dk_m)
                              : dk_form == "moore" ? dickson_moore(dk_m)
                                                   : dickson_determinant(dk_m);
            if (json)
                out << nlohmann::json{{"schema", kSchema}, {"kind", "dickson"}, {"m", dk_m}, {"form", dk_form},
                                      {"terms", p.size()}, {"polynomial", p.to_string()}}.dump(2)
                    << '\n';
            else
                out << p.to_string() << '\n';
            return kOk;
        }
        if (certify_cmd->parsed()) {
            const Certificate cert = certify(c_m, c_l, c_d);
            if (json) {
                out << certificate_to_json(cert).dump(2) << '\n';
            } else {
                out << to_string(cert.verdict) << ": m=" << c_m << " l=" << c_l << " d=" << c_d << " ("
                    << cert.problem.box_count() << " boxes)\n";
                if (cert.witness) out << "witness " << cert.witness->to_string() << '\n';
                else out << "criterion lies in (x1^d, ..., xm^d); no claim either way\n";
                for (const auto& w : cert.warnings) out << "warning: " << w << '\n';
            }
            for (const auto& w : cert.warnings) err << "warning: " << w << '\n';
            return cert.verdict == Verdict::Certified ? kOk : kNegative;
        }
        if (mind->parsed()) {
            const unsigned d = min_dimension(md_m, md_l);
            if (json)
                out << nlohmann::json{{"schema", kSchema}, {"kind", "min-d"}, {"m", md_m}, {"l", md_l}, {"d", d}}.dump(2) << '\n';
            else
                out << d << '\n';
            return kOk;
        }
        if (table->parsed()) {
            const auto rows = equipartition_table(t_m, t_lmax);
            if (json || t_format == "json") {
                out << table_to_json(t_m, rows).dump(2) << '\n';
            } else if (t_format == "csv") {
                out << "l,d\n";
                for (const auto& r : rows) out << r.l << ',' << r.d << '\n';
            } else {
                detail::print_markdown_table(out, t_m, rows);
            }
            return kOk;
        }
        if (decompose->parsed()) {
            const ActionSpec spec = build_test_representation(r_m, r_l);
            const ActionCheck check = check_action(spec);
            const CharacterTable chars = character_multiplicities(spec);
            const IndexOutcome index = index_polynomial(chars);
            const PolyGF2 criterion = criterion_polynomial(r_m, r_l);
            const PolyGF2* ip = std::get_if<PolyGF2>(&index);
            const bool match = ip != nullptr && *ip == criterion && check.ok();
            if (json) {
                nlohmann::json j{{"schema", kSchema}, {"kind", "decompose"}, {"m", r_m}, {"l", r_l},
                                 {"boxes", spec.box_count}, {"action_ok", check.ok()},
                                 {"table", character_table_to_json(chars)},
                                 {"criterion", criterion.to_string()},
                                 {"result", match ? "MATCH" : "MISMATCH"}};
                if (ip) j["index_polynomial"] = ip->to_string();
                else j["failure"] = {{"trivial_multiplicity", std::get<FixedPointFailure>(index).trivial_multiplicity}};
                out << j.dump(2) << '\n';
            } else {
                out << "m=" << r_m << " l=" << r_l << " boxes=" << spec.box_count << " dim V=" << chars.total_dim << '\n';
                out << "character     multiplicity\n";
                for (const auto& [chi, mult] : chars.multiplicities) {
                    std::string name = character_name(chi, r_m);
                    name.resize(std::max<std::size_t>(name.size(), 14), ' ');
                    out << name << mult << '\n';
                }
                if (ip) out << "index polynomial: " << detail::short_poly(*ip) << '\n';
                else out << "FAILURE: trivial character occurs; the action has fixed points\n";
                out << "criterion:        " << detail::short_poly(criterion) << '\n';
                if (!check.ok()) out << "action check failed\n";
                out << (match ? "MATCH" : "MISMATCH") << '\n';
            }
            return match ? kOk : kNegative;
        }
        if (gen->parsed()) {
            std::ofstream file;
            if (!g_out.empty()) {
                file.open(g_out);
                if (!file) throw Error(ErrorCode::Parse, "cannot write '" + g_out + "'");
            }
            std::ostream& dst = g_out.empty() ? out : file;
            if (g_kind == "gaussian-mixture") {
                const Measure mu = sample_point_cloud(random_mixture(g_d, g_components, g_seed), g_n, g_seed);
                write_point_cloud_csv(dst, *mu.cloud());
            } else {
                const Measure mu = g_kind == "gaussian-grid"
                                       ? rasterize_grid(isotropic_gaussian(g_d), g_n, 6.0)
                                       : rasterize_grid(random_mixture(g_d, g_components, g_seed), g_n);
                dst << grid_to_json(*mu.grid()).dump() << '\n';
            }
            return kOk;
        }
        if (solve->parsed()) {
            const Measure mu = load_measure(s_input);
            s_opts.tol = s_tol.value_or(std::max(1e-4, 3.0 * mu.quantization_bound()));
            const SolveReport rep = solve_equipartition(mu, s_l, s_m, s_opts);
            out << solve_report_to_json(rep).dump(2) << '\n';
            return rep.status == SolveStatus::Converged ? kOk : kNegative;
        }
        if (verify->parsed()) {
            const Measure mu = load_measure(v_input);
            std::ifstream in(v_config);
            if (!in) throw Error(ErrorCode::Parse, "cannot open '" + v_config + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
            }
            const Configuration cfg = config_from_json(j);
            const VerifyReport rep = verify_configuration(mu, cfg, v_tol);
            for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
            if (json) {
                out << verify_report_to_json(rep).dump(2) << '\n';
            } else {
                detail::print_masses(out, rep.masses);
                char buf[96];
                std::snprintf(buf, sizeof buf, "max |mass - %.12f| = %.3e (tol %.3e)\n", rep.target, rep.max_deviation, rep.tol);
                out << buf << (rep.pass ? "PASS" : "FAIL") << '\n';
            }
            return rep.pass ? kOk : kNegative;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    err << "error: no subcommand\n";
    return kUsage;
}

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"equibox"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace equibox::cli
