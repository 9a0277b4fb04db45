#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entropy_games.hpp"

namespace entropy_games::cli {

enum ExitCode : int { ok = 0, solve_failure = 1, input_error = 2 };

namespace detail {

inline nlohmann::json report_json(const EntropyGame& g, const SolveReport& rep) {
    nlohmann::json out;
    out["algorithm"] = rep.algorithm;
    out["states"] = g.despot_ids();
    out["values"] = rep.values;
    out["value"] = rep.max_value();
    if (rep.despot_policy) out["despot_policy"] = to_json(g, *rep.despot_policy);
    if (rep.tribune_policy) out["tribune_policy"] = to_json(g, *rep.tribune_policy);
    out["iterations"] = rep.iterations;
    out["inner_iterations"] = rep.inner_iterations;
    out["wall_time_s"] = rep.wall_time;
    out["converged"] = rep.converged;
    out["residual"] = rep.residual;
    return out;
}

inline void print_report(std::ostream& out, const EntropyGame& g, const SolveReport& rep,
                         const std::optional<CwCertificate>& cert, const std::optional<CwCheck>& check) {
    out << std::setprecision(12);
    out << "algorithm: " << rep.algorithm << "\n";
    out << "converged: " << (rep.converged ? "yes" : "no") << " (residual " << rep.residual << ")\n";
    out << "iterations: " << rep.iterations << " outer, " << rep.inner_iterations << " inner\n";
    out << "value (max over states): " << rep.max_value() << "\n";
    for (Index d = 0; d < g.num_despot(); ++d) {
        out << "  " << g.despot_ids()[d] << ": " << rep.values[d];
        if (rep.despot_policy) out << "  -> " << g.tribune_ids()[(*rep.despot_policy)[d]];
        out << "\n";
    }
    if (rep.tribune_policy) {
        out << "tribune policy:";
        for (Index t = 0; t < g.num_tribune(); ++t)
            out << " " << g.tribune_ids()[t] << "->" << g.people_ids()[(*rep.tribune_policy)[t]];
        out << "\n";
    }
    if (cert && check)
        out << "certificate F(X) " << to_string(cert->direction) << " " << cert->lambda << " X: "
            << (check->pass ? "pass" : "FAIL") << "\n";
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidGame("cannot open file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidGame("'" + path + "' is not valid JSON: " + e.what());
    }
}

/// Writes to the file at `path`, or to `fallback` when the path is empty.
template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty()) {
        fn(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw InvalidGame("cannot write '" + path + "'");
    fn(file);
}

}  // namespace detail

/**
 * Command line entry point. `args` excludes the program name. Returns 0 on
 * success, 1 when a solve or a verification fails, 2 on invalid input.
 */
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entropy game solver: values, optimal policies and Collatz-Wielandt certificates"};
    app.require_subcommand(1);

    std::string game_path, cert_path, out_path, config_path, algo = "auto", cert_out;
    double eps = 1e-10;
    std::optional<std::uint64_t> seed;
    bool as_json = false, log_scale = false;
    std::size_t horizon = 0;
    RandomSpec spec;

    auto* solve_cmd = app.add_subcommand("solve", "Solve a game given as JSON");
    solve_cmd->add_option("game", game_path, "Game file")->required();
    solve_cmd->add_option("--algo", algo, "pi|simplex|simplex-d|hk|km|oracle|enum|ellipsoid|auto")
        ->check(CLI::IsMember({"pi", "simplex", "simplex-d", "hk", "km", "oracle", "enum", "ellipsoid", "auto"}));
    solve_cmd->add_option("--eps", eps, "Tolerance (km Hilbert metric; ellipsoid uses max(eps, 1e-6))");
    solve_cmd->add_option("--seed", seed, "Seed for random initial policies");
    solve_cmd->add_flag("--json", as_json, "Machine-readable report on stdout");
    solve_cmd->add_option("--certificate", cert_out, "Write the certificate to this file");

    auto* verify_cmd = app.add_subcommand("verify", "Check a Collatz-Wielandt certificate");
    verify_cmd->add_option("game", game_path, "Game file")->required();
    verify_cmd->add_option("certificate", cert_path, "Certificate file")->required();

    auto* gen_cmd = app.add_subcommand("gen", "Generate a random game");
    gen_cmd->add_option("--n", spec.n, "Despot states")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--m", spec.m, "Tribune actions per state")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--W", spec.W, "Weight bound")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", spec.seed, "Generator seed");
    gen_cmd->add_flag("--two-player", spec.two_player, "Give Despot several actions");
    gen_cmd->add_option("--despot-actions", spec.despot_actions, "Despot actions per state")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("-o,--output", out_path, "Output file (stdout if omitted)");

    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark grid");
    bench_cmd->add_option("--config", config_path, "JSON configuration")->required();
    bench_cmd->add_option("-o,--output", out_path, "CSV file (stdout if omitted)");

    auto* vi_cmd = app.add_subcommand("value-iterate", "Finite-horizon values V^k = F^k(e)");
    vi_cmd->add_option("game", game_path, "Game file")->required();
    vi_cmd->add_option("--k", horizon, "Horizon")->required();
    vi_cmd->add_flag("--log", log_scale, "Report log V^k, computed stably");

    std::vector<const char*> argv{"entropy-games"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : input_error;
    }

    try {
        if (solve_cmd->parsed()) {
            const EntropyGame g = load_game(game_path);
            SolveOptions opt;
            opt.algorithm = parse_algorithm(algo);
            opt.eps = eps;
            opt.seed = seed;
            SolveReport rep;
            try {
                rep = solve(g, opt);
            } catch (const InvalidGame&) {
                throw;
            } catch (const std::exception& e) {
                err << "solve failed: " << e.what() << "\n";
                return solve_failure;
            }
            std::optional<CwCertificate> cert;
            std::optional<CwCheck> check;
            try {
                cert = certificate_from_report(g, rep);
                check = check_cw(g, *cert);
            } catch (const std::exception&) {
            }
            if (as_json) {
                nlohmann::json j = detail::report_json(g, rep);
                if (cert) {
                    j["certificate"] = to_json(*cert);
                    j["certificate_check"] = check->pass;
                }
                out << j.dump(2) << "\n";
            } else {
                detail::print_report(out, g, rep, cert, check);
            }
            if (!cert_out.empty() && cert)
                detail::with_output(cert_out, out, [&](std::ostream& o) { o << to_json(*cert).dump(2) << "\n"; });
            return rep.converged ? ok : solve_failure;
        }
        if (verify_cmd->parsed()) {
            const EntropyGame g = load_game(game_path);
            const CwCertificate cert = parse_certificate(detail::read_json_file(cert_path));
            const CwCheck check = check_cw(g, cert);
            if (check.pass) {
                out << "certificate valid: F(X) " << to_string(cert.direction) << " " << cert.lambda << " X\n";
                return ok;
            }
            out << "certificate invalid: " << check.reason << "\n";
            return solve_failure;
        }
        if (gen_cmd->parsed()) {
            const EntropyGame g = generate(spec);
            detail::with_output(out_path, out, [&](std::ostream& o) { o << serialize_game(g, 2) << "\n"; });
            return ok;
        }
        if (bench_cmd->parsed()) {
            const BenchConfig config = parse_bench_config(detail::read_json_file(config_path));
            bool all_ok = true;
            detail::with_output(out_path, out, [&](std::ostream& o) {
                for (const BenchRecord& r : run_bench(config, &o)) {
                    if (!r.error.empty()) {
                        err << "row failed (n=" << r.spec.n << ", seed=" << r.spec.seed << ", " << r.algorithm
                            << "): " << r.error << "\n";
                        all_ok = false;
                    }
                }
            });
            return all_ok ? ok : solve_failure;
        }
        if (vi_cmd->parsed()) {
            const EntropyGame g = load_game(game_path);
            ValueVector v;
            try {
                v = log_scale ? log_value_iterate(g, horizon) : value_iterate(g, horizon);
            } catch (const Overflow& e) {
                err << e.what() << "\n";
                return solve_failure;
            }
            out << std::setprecision(17);
            for (Index d = 0; d < g.num_despot(); ++d) out << g.despot_ids()[d] << " " << v[d] << "\n";
            return ok;
        }
    } catch (const InvalidGame& e) {
        err << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const nlohmann::json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return solve_failure;
    }
    return input_error;
}

}  // namespace entropy_games::cli
