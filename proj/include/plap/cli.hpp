#pragma once

// `plap` command-line front end. Subcommands: ptrig-table, eigs, verify,
// sweep, classify.
//
// Exit codes: 0 success / verified, 1 usage or input error, 2 solver
// failure, 3 violated, 4 inconclusive.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plap/eigensolver.hpp"
#include "plap/errors.hpp"
#include "plap/format.hpp"
#include "plap/potential.hpp"
#include "plap/potential_io.hpp"
#include "plap/ptrig.hpp"
#include "plap/report.hpp"
#include "plap/theorems.hpp"

namespace plap {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitSolver = 2,
    kExitViolated = 3,
    kExitInconclusive = 4,
};

/// Bad flags, bad config file, bad value combinations.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Effective configuration of one run after merging defaults, the config
/// file and command-line flags.
struct RunConfig {
    std::string command;
    double p = 2.0;
    std::string potential_source = R"({"type":"constant","value":0})";
    std::optional<double> ell;  // defaults to the potential's domain end
    int n_max = 5;
    HarnessConfig harness;  // harness.solver holds the solver and ODE tolerances
    std::string format = "csv";
    std::string out;
    std::string theorem = "t2";
    std::string axis = "ell";
    std::vector<double> values;
    std::uint64_t seed = 0;
    double x_min = 0.0;
    std::optional<double> x_max;  // defaults to pi_p
    int steps = 9;
};

namespace cli_detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// `--potential` accepts an inline JSON spec, the word `random` (seeded
/// nonpositive piecewise-linear), or a file path.
inline Potential load_potential(const std::string& src, std::uint64_t seed) {
    std::size_t i = src.find_first_not_of(" \t\r\n");
    if (i != std::string::npos && src[i] == '{') return parse_potential_spec(src);
    if (src == "random") return random_nonpositive_potential(seed);
    return parse_potential_spec(read_file(src));
}

template <typename T>
T config_value(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("config key \"") + key + "\" has the wrong type");
    }
}

/// Applies a JSON config document; keys mirror the long flag names with
/// '-' replaced by '_'.
inline void apply_config_file(RunConfig& rc, const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    SolverConfig& s = rc.harness.solver;
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        if (key == "p") rc.p = config_value<double>(j, k);
        else if (key == "potential")
            rc.potential_source = value.is_string() ? value.get<std::string>() : value.dump();
        else if (key == "ell") rc.ell = config_value<double>(j, k);
        else if (key == "n_max") rc.n_max = config_value<int>(j, k);
        else if (key == "rel_tol") s.tol.rel_tol = config_value<double>(j, k);
        else if (key == "abs_tol") s.tol.abs_tol = config_value<double>(j, k);
        else if (key == "max_steps") s.tol.max_steps = config_value<long long>(j, k);
        else if (key == "phase_tol") s.phase_tol = config_value<double>(j, k);
        else if (key == "max_bisections") s.max_bisections = config_value<int>(j, k);
        else if (key == "ratio_slack") rc.harness.ratio_slack = config_value<double>(j, k);
        else if (key == "sign_slack") rc.harness.sign_slack = config_value<double>(j, k);
        else if (key == "grid") rc.harness.grid_n = config_value<int>(j, k);
        else if (key == "fd_crosscheck") rc.harness.fd_crosscheck = config_value<bool>(j, k);
        else if (key == "format") rc.format = config_value<std::string>(j, k);
        else if (key == "out") rc.out = config_value<std::string>(j, k);
        else if (key == "theorem") rc.theorem = config_value<std::string>(j, k);
        else if (key == "axis") rc.axis = config_value<std::string>(j, k);
        else if (key == "values") rc.values = config_value<std::vector<double>>(j, k);
        else if (key == "seed") rc.seed = config_value<std::uint64_t>(j, k);
        else if (key == "x_min") rc.x_min = config_value<double>(j, k);
        else if (key == "x_max") rc.x_max = config_value<double>(j, k);
        else if (key == "steps") rc.steps = config_value<int>(j, k);
        else throw UsageError("unknown config key \"" + key + "\"");
    }
}

inline void validate(const RunConfig& rc) {
    const SolverConfig& s = rc.harness.solver;
    if (!std::isfinite(rc.p) || rc.p <= 1.0) throw UsageError("--p must be a finite number > 1");
    if (rc.n_max < 1) throw UsageError("--n-max must be >= 1");
    if (rc.ell && !(*rc.ell > 0.0 && *rc.ell <= 1.0)) throw UsageError("--ell must lie in (0, 1]");
    if (!(s.tol.rel_tol > 0.0) || !(s.tol.abs_tol > 0.0) || !(s.phase_tol > 0.0) ||
        s.tol.max_steps < 1 || s.max_bisections < 1)
        throw UsageError("tolerances and iteration limits must be positive");
    if (!(rc.harness.ratio_slack >= 0.0) || !(rc.harness.sign_slack >= 0.0))
        throw UsageError("slacks must be nonnegative");
    if (rc.format != "csv" && rc.format != "report")
        throw UsageError("--format must be csv or report");
}

inline ojson to_json(const RunConfig& rc, const std::optional<Potential>& q) {
    ojson j;
    j["command"] = rc.command;
    j["p"] = rc.p;
    if (q) j["potential"] = potential_to_json(*q);
    if (rc.ell) j["ell"] = *rc.ell;
    j["n_max"] = rc.n_max;
    j["seed"] = rc.seed;
    j["format"] = rc.format;
    j["harness"] = plap::to_json(rc.harness);
    if (rc.command == "verify") j["theorem"] = rc.theorem;
    if (rc.command == "sweep") {
        j["axis"] = rc.axis;
        j["values"] = rc.values;
    }
    if (rc.command == "ptrig-table") {
        j["x_min"] = rc.x_min;
        if (rc.x_max) j["x_max"] = *rc.x_max;
        j["steps"] = rc.steps;
    }
    return j;
}

/// Rebuilds a family member at a new depth: tent depth, well height or
/// constant value. Shift and restriction carry over.
inline Potential with_depth(const Potential& q, double depth) {
    auto param = [&](const char* name) {
        for (const auto& [k, v] : q.params())
            if (k == name) return v;
        return 0.0;
    };
    Potential r;
    if (q.kind() == PotentialKind::constant)
        r = Potential::constant(depth);
    else if (q.family() == "scaled_tent")
        r = Potential::scaled_tent(depth, param("rise"));
    else if (q.family() == "scaled_well")
        r = Potential::scaled_well(depth, param("dip"));
    else
        throw UsageError("--axis depth needs a constant, scaled_tent or scaled_well potential");
    if (q.shift() != 0.0) r = r.shifted(q.shift());
    if (q.domain_end() < 1.0) r = r.restricted(q.domain_end());
    return r;
}

/// Sink that writes either to `out` or to the file named by --out.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw UsageError("cannot write " + path);
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

inline int exit_for(Verdict v) {
    switch (v) {
        case Verdict::verified: return kExitOk;
        case Verdict::violated: return kExitViolated;
        case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

inline int cmd_ptrig_table(const RunConfig& rc, std::ostream& os) {
    const PContext ctx = make_context(rc.p);
    const double x_max = rc.x_max.value_or(ctx.pi_p());
    if (rc.steps < 2) throw UsageError("--steps must be >= 2");
    if (!std::isfinite(rc.x_min) || !std::isfinite(x_max) || !(x_max > rc.x_min))
        throw UsageError("need finite --x-min < --x-max");
    ojson cfg = to_json(rc, std::nullopt);
    cfg["x_max"] = x_max;
    ojson rows = ojson::array();
    if (rc.format == "csv") {
        write_csv_header(os, cfg);
        os << "x,S_p,S_p_prime,identity\n";
    }
    for (int i = 0; i < rc.steps; ++i) {
        const double x =
            i == rc.steps - 1 ? x_max : rc.x_min + (x_max - rc.x_min) * i / (rc.steps - 1);
        const SinCosP sc = sincos_p(ctx, x);
        const double id = std::pow(std::abs(sc.s), rc.p) + std::pow(std::abs(sc.c), rc.p);
        if (rc.format == "csv")
            os << format_double(x) << ',' << format_double(sc.s) << ',' << format_double(sc.c)
               << ',' << format_double(id) << '\n';
        else
            rows.push_back(ojson{{"x", x}, {"S_p", sc.s}, {"S_p_prime", sc.c}, {"identity", id}});
    }
    if (rc.format == "report")
        os << ojson{{"config", cfg}, {"pi_p", ctx.pi_p()}, {"rows", rows}}.dump(2) << '\n';
    return kExitOk;
}

inline int cmd_eigs(const RunConfig& rc, const Potential& q, double ell, std::ostream& os) {
    const PContext ctx = make_context(rc.p);
    const Spectrum s = compute_spectrum(ctx, q, rc.n_max, ell, rc.harness.solver);
    const ojson cfg = to_json(rc, q);
    if (rc.format == "csv") {
        write_csv_header(os, cfg);
        write_spectrum_csv(os, s);
    } else {
        os << ojson{{"config", cfg}, {"spectrum", plap::to_json(s)}}.dump(2) << '\n';
    }
    return kExitOk;
}

inline int cmd_verify(const RunConfig& rc, const Potential& q, std::ostream& os) {
    const PContext ctx = make_context(rc.p);
    TheoremCertificate c;
    if (rc.theorem == "t1")
        c = verify_theorem1(ctx, q, {}, rc.harness);
    else if (rc.theorem == "t2")
        c = verify_theorem2(ctx, q, rc.n_max, rc.harness);
    else if (rc.theorem == "t3")
        c = verify_theorem3(ctx, q, {}, rc.n_max, rc.harness);
    else if (rc.theorem == "r1")
        c = verify_remark1(ctx, q, rc.n_max, rc.harness);
    else
        throw UsageError("--theorem must be one of t1, t2, t3, r1");
    const ojson cfg = to_json(rc, q);
    if (rc.format == "csv") {
        write_csv_header(os, cfg);
        write_certificate_csv(os, c);
    } else {
        ojson j = plap::to_json(c);
        j["run"] = cfg;
        os << j.dump(2) << '\n';
    }
    return exit_for(c.verdict);
}

inline int cmd_sweep(const RunConfig& rc, const Potential& q, double ell, std::ostream& os) {
    if (rc.axis != "p" && rc.axis != "ell" && rc.axis != "depth")
        throw UsageError("--axis must be one of p, ell, depth");
    if (rc.values.size() < 2) throw UsageError("--values needs at least 2 entries");
    struct Row {
        double value;
        int n;
        double lambda;
        double ratio;
        double bound;
        const char* status;
    };
    std::vector<Row> rows;
    for (double v : rc.values) {
        double p = rc.p, e = ell;
        Potential qv = q;
        if (rc.axis == "p") {
            if (!std::isfinite(v) || v <= 1.0) throw UsageError("p values must be > 1");
            p = v;
        } else if (rc.axis == "ell") {
            if (!(v > 0.0 && v <= q.domain_end()))
                throw UsageError("ell values must lie in (0, domain end]");
            e = v;
        } else {
            qv = with_depth(q, v);
        }
        const PContext ctx = make_context(p);
        std::vector<double> lams;
        std::vector<const char*> status;
        for (int n = 1; n <= rc.n_max; ++n) {
            try {
                lams.push_back(find_eigenvalue(ctx, qv, n, e, rc.harness.solver).lambda);
                status.push_back("ok");
            } catch (const UnsupportedRegimeError&) {
                // lambda_n <= 0: the phase method does not apply, shoot directly.
                lams.push_back(oracle_eigenvalue(ctx, qv, n, e, rc.harness.solver));
                status.push_back("nonpositive");
            }
        }
        for (int n = 1; n <= rc.n_max; ++n)
            rows.push_back({v, n, lams[n - 1], lams[n - 1] / lams[0], std::pow(n, p),
                            status[n - 1]});
    }
    const ojson cfg = to_json(rc, q);
    if (rc.format == "csv") {
        write_csv_header(os, cfg);
        os << "axis,value,n,lambda,ratio_to_lambda1,bound,status\n";
        for (const Row& r : rows)
            os << rc.axis << ',' << format_double(r.value) << ',' << r.n << ','
               << format_double(r.lambda) << ',' << format_double(r.ratio) << ','
               << format_double(r.bound) << ',' << r.status << '\n';
    } else {
        ojson arr = ojson::array();
        for (const Row& r : rows)
            arr.push_back(ojson{{"axis", rc.axis},
                                {"value", r.value},
                                {"n", r.n},
                                {"lambda", json_number(r.lambda)},
                                {"ratio_to_lambda1", json_number(r.ratio)},
                                {"bound", r.bound},
                                {"status", r.status}});
        os << ojson{{"config", cfg}, {"rows", arr}}.dump(2) << '\n';
    }
    return kExitOk;
}

inline int cmd_classify(const RunConfig& rc, const Potential& q, std::ostream& os) {
    const ShapeCertificate c = classify(q, rc.harness.grid_n);
    const ojson cfg = to_json(rc, q);
    if (rc.format == "csv") {
        write_csv_header(os, cfg);
        os << "key,value\n";
        const auto shape = plap::to_json(c);
        for (const auto& [k, v] : shape.items()) {
            os << k << ',';
            if (v.is_number_float()) os << format_double(v.get<double>());
            else if (v.is_string()) os << v.get<std::string>();
            else os << v.dump();
            os << '\n';
        }
    } else {
        os << ojson{{"config", cfg}, {"shape", plap::to_json(c)}}.dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace cli_detail

/// Runs the CLI; data goes to `out` (or --out), diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;

    CLI::App app{"p-Laplacian eigenvalue ratios: spectra, theorem checks, sweeps"};
    app.require_subcommand(1);

    RunConfig rc;
    SolverConfig& sc = rc.harness.solver;
    struct Flags {
        double p, ell, rel_tol, abs_tol, phase_tol, ratio_slack, sign_slack, x_min, x_max;
        long long max_steps;
        int n_max, max_bisections, grid, steps;
        std::string potential, format, out, theorem, axis, config;
        std::vector<double> values;
        std::uint64_t seed;
        bool fd_crosscheck = false;
    } f{};
    std::vector<std::pair<std::string, CLI::Option*>> opts;

    auto common = [&](CLI::App* sub, bool potential, bool solver) {
        opts.push_back({"p", sub->add_option("--p", f.p, "exponent p > 1")});
        opts.push_back({"format", sub->add_option("--format", f.format, "csv or report")
                                      ->check(CLI::IsMember({"csv", "report"}))});
        opts.push_back({"out", sub->add_option("--out", f.out, "output path (default stdout)")});
        opts.push_back({"config", sub->add_option("--config", f.config, "JSON config file")});
        if (potential) {
            opts.push_back({"potential", sub->add_option("--potential", f.potential,
                                                         "spec file, inline JSON or 'random'")});
            opts.push_back({"ell", sub->add_option("--ell", f.ell, "interval length in (0, 1]")});
            opts.push_back({"seed", sub->add_option("--seed", f.seed, "seed for 'random'")});
            opts.push_back({"grid", sub->add_option("--grid", f.grid, "classification grid")});
        }
        if (solver) {
            opts.push_back({"n_max", sub->add_option("--n-max", f.n_max, "highest index")});
            opts.push_back({"rel_tol", sub->add_option("--rel-tol", f.rel_tol)});
            opts.push_back({"abs_tol", sub->add_option("--abs-tol", f.abs_tol)});
            opts.push_back({"phase_tol", sub->add_option("--phase-tol", f.phase_tol)});
            opts.push_back({"max_steps", sub->add_option("--max-steps", f.max_steps)});
            opts.push_back({"max_bisections", sub->add_option("--max-bisections", f.max_bisections)});
        }
    };

    CLI::App* ptab = app.add_subcommand("ptrig-table", "tabulate S_p and S_p'");
    common(ptab, false, false);
    opts.push_back({"x_min", ptab->add_option("--x-min", f.x_min)});
    opts.push_back({"x_max", ptab->add_option("--x-max", f.x_max, "default pi_p")});
    opts.push_back({"steps", ptab->add_option("--steps", f.steps, "number of rows")});

    CLI::App* eigs = app.add_subcommand("eigs", "Dirichlet eigenvalues 1..n_max");
    common(eigs, true, true);

    CLI::App* verify = app.add_subcommand("verify", "check a theorem on one potential");
    common(verify, true, true);
    opts.push_back({"theorem", verify->add_option("--theorem", f.theorem)
                                   ->check(CLI::IsMember({"t1", "t2", "t3", "r1"}))});
    opts.push_back({"ratio_slack", verify->add_option("--ratio-slack", f.ratio_slack)});
    opts.push_back({"sign_slack", verify->add_option("--sign-slack", f.sign_slack)});
    opts.push_back({"fd_crosscheck", verify->add_flag("--fd-crosscheck", f.fd_crosscheck,
                                                      "finite-difference theta-dot column (t1)")});

    CLI::App* sweep = app.add_subcommand("sweep", "eigenvalues across p, ell or depth");
    common(sweep, true, true);
    opts.push_back({"axis", sweep->add_option("--axis", f.axis)
                                ->check(CLI::IsMember({"p", "ell", "depth"}))});
    opts.push_back({"values", sweep->add_option("--values", f.values)->delimiter(',')});

    CLI::App* cls = app.add_subcommand("classify", "shape certificate of a potential");
    common(cls, true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto given = [&](const char* key) {
        for (const auto& [k, o] : opts)
            if (k == key && o->count() > 0) return true;
        return false;
    };

    std::optional<Potential> q;
    try {
        for (CLI::App* sub : app.get_subcommands()) rc.command = sub->get_name();
        if (given("config")) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(f.config));
            } catch (const nlohmann::json::parse_error& e) {
                throw UsageError(f.config + ": " + e.what());
            }
            apply_config_file(rc, j);
        }
        if (given("p")) rc.p = f.p;
        if (given("potential")) rc.potential_source = f.potential;
        if (given("ell")) rc.ell = f.ell;
        if (given("seed")) rc.seed = f.seed;
        if (given("grid")) rc.harness.grid_n = f.grid;
        if (given("n_max")) rc.n_max = f.n_max;
        if (given("rel_tol")) sc.tol.rel_tol = f.rel_tol;
        if (given("abs_tol")) sc.tol.abs_tol = f.abs_tol;
        if (given("phase_tol")) sc.phase_tol = f.phase_tol;
        if (given("max_steps")) sc.tol.max_steps = f.max_steps;
        if (given("max_bisections")) sc.max_bisections = f.max_bisections;
        if (given("format")) rc.format = f.format;
        if (given("out")) rc.out = f.out;
        if (given("theorem")) rc.theorem = f.theorem;
        if (given("ratio_slack")) rc.harness.ratio_slack = f.ratio_slack;
        if (given("sign_slack")) rc.harness.sign_slack = f.sign_slack;
        if (given("fd_crosscheck")) rc.harness.fd_crosscheck = f.fd_crosscheck;
        if (given("axis")) rc.axis = f.axis;
        if (given("values")) rc.values = f.values;
        if (given("x_min")) rc.x_min = f.x_min;
        if (given("x_max")) rc.x_max = f.x_max;
        if (given("steps")) rc.steps = f.steps;
        validate(rc);

        if (rc.command != "ptrig-table") {
            Potential base = load_potential(rc.potential_source, rc.seed);
            if (rc.ell && *rc.ell > base.domain_end())
                throw UsageError("--ell exceeds the potential's domain");
            if (rc.ell && *rc.ell < base.domain_end()) base = base.restricted(*rc.ell);
            q = base;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "potential spec error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "input error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        Output sink(rc.out, out);
        std::ostream& os = sink.stream();
        const double ell = q ? q->domain_end() : 1.0;
        if (rc.command == "ptrig-table") return cmd_ptrig_table(rc, os);
        if (rc.command == "eigs") return cmd_eigs(rc, *q, ell, os);
        if (rc.command == "verify") return cmd_verify(rc, *q, os);
        if (rc.command == "sweep") return cmd_sweep(rc, *q, ell, os);
        return cmd_classify(rc, *q, os);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SearchError& e) {
        err << "solver failure at index " << e.index() << ": " << e.what() << '\n';
        return kExitSolver;
    } catch (const UnsupportedRegimeError& e) {
        err << "solver failure at index " << e.index() << ": " << e.what() << '\n';
        return kExitSolver;
    } catch (const IntegrationError& e) {
        err << "solver failure: " << e.what() << " (last good x = " << e.last_good_x() << ")\n";
        return kExitSolver;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
}

}  // namespace plap
