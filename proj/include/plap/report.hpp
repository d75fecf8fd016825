#pragma once

// Serialization of spectra and theorem certificates: a structured JSON
// report and a long-form CSV table.

#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "plap/eigensolver.hpp"
#include "plap/format.hpp"
#include "plap/potential_io.hpp"
#include "plap/theorems.hpp"

namespace plap {

using ojson = nlohmann::ordered_json;

/// JSON has no NaN or infinity; those become null.
inline ojson json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline ojson to_json(const ToleranceConfig& t) {
    return ojson{{"rel_tol", t.rel_tol}, {"abs_tol", t.abs_tol}, {"max_steps", t.max_steps}};
}

inline ojson to_json(const SolverConfig& s) {
    return ojson{{"phase_tol", s.phase_tol},
                 {"max_bisections", s.max_bisections},
                 {"use_secant", s.use_secant},
                 {"tolerances", to_json(s.tol)},
                 {"oracle_tolerances", to_json(s.oracle_tol)}};
}

inline ojson to_json(const HarnessConfig& h) {
    return ojson{{"solver", to_json(h.solver)},
                 {"ratio_slack", h.ratio_slack},
                 {"sign_slack", h.sign_slack},
                 {"grid_n", h.grid_n},
                 {"t1_grid_points", h.t1_grid_points},
                 {"t3_grid_points", h.t3_grid_points},
                 {"fd_crosscheck", h.fd_crosscheck},
                 {"fd_step", h.fd_step}};
}

inline ojson to_json(const ShapeCertificate& c) {
    return ojson{{"shape", to_string(c.shape)},
                 {"x0", c.x0},
                 {"nonpositive", c.nonpositive},
                 {"nonnegative", c.nonnegative},
                 {"q_star", c.q_star},
                 {"q0", c.q0},
                 {"q1", c.q1},
                 {"q_min", c.q_min},
                 {"q_max", c.q_max},
                 {"ell", c.ell},
                 {"grid_resolution", c.grid_resolution}};
}

inline ojson to_json(const ScanPoint& s) {
    ojson j;
    for (const auto& [k, v] : s.fields) j[k] = json_number(v);
    j["margin"] = json_number(s.margin);
    j["status"] = s.status;
    j["ok"] = s.ok;
    if (!s.note.empty()) j["note"] = s.note;
    return j;
}

inline ojson to_json(const TheoremCertificate& c) {
    ojson j;
    j["theorem_id"] = to_string(c.theorem);
    j["p"] = c.p;
    ojson hyp = to_json(c.hypotheses);
    hyp["hold"] = c.hypotheses_hold;
    for (const auto& [k, v] : c.thresholds) hyp[k] = json_number(v);
    j["hypotheses"] = hyp;
    ojson scan = ojson::array();
    for (const ScanPoint& s : c.scan) scan.push_back(to_json(s));
    j["scan"] = scan;
    j["verdict"] = to_string(c.verdict);
    j["worst_margin"] = json_number(c.worst_margin);
    j["slack"] = c.slack;
    if (c.witness) j["witness"] = to_json(*c.witness);
    j["notes"] = c.notes;
    j["config"] = to_json(c.config);
    return j;
}

inline ojson to_json(const Eigenpair& e) {
    return ojson{{"n", e.n},
                 {"lambda", e.lambda},
                 {"rho", e.rho},
                 {"phi_end", e.phi_end},
                 {"residual", e.residual},
                 {"zero_count", e.zero_count},
                 {"bracket_width", e.bracket_width}};
}

inline ojson to_json(const Spectrum& s) {
    ojson pairs = ojson::array();
    for (const Eigenpair& e : s.pairs) pairs.push_back(to_json(e));
    return ojson{{"p", s.ctx.p()},
                 {"pi_p", s.ctx.pi_p()},
                 {"ell", s.ell},
                 {"potential", potential_to_json(s.potential)},
                 {"solver", to_json(s.config)},
                 {"pairs", pairs}};
}

/// Writes `# key=value` header lines. Lines are '\n'-terminated.
inline void write_csv_header(std::ostream& os, const ojson& config) {
    os << "# config=" << config.dump() << '\n';
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "n,lambda,rho,phi_end,residual,zero_count,bracket_width\n";
    for (const Eigenpair& e : s.pairs) {
        os << e.n << ',' << format_double(e.lambda) << ',' << format_double(e.rho) << ','
           << format_double(e.phi_end) << ',' << format_double(e.residual) << ','
           << e.zero_count << ',' << format_double(e.bracket_width) << '\n';
    }
}

/// One scan point per row; columns are the union of field names in order
/// of first appearance, then margin, status, ok.
inline void write_certificate_csv(std::ostream& os, const TheoremCertificate& c) {
    std::vector<std::string> cols;
    for (const ScanPoint& s : c.scan)
        for (const auto& [k, v] : s.fields)
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    os << "# theorem=" << to_string(c.theorem) << '\n';
    os << "# verdict=" << to_string(c.verdict) << '\n';
    os << "# worst_margin=" << format_double(c.worst_margin) << '\n';
    os << "# slack=" << format_double(c.slack) << '\n';
    for (const auto& [k, v] : c.thresholds) os << "# " << k << '=' << format_double(v) << '\n';
    os << "theorem";
    for (const auto& k : cols) os << ',' << k;
    os << ",margin,status,ok\n";
    for (const ScanPoint& s : c.scan) {
        os << to_string(c.theorem);
        for (const auto& k : cols) {
            os << ',';
            bool found = false;
            for (const auto& [fk, fv] : s.fields)
                if (fk == k) {
                    os << format_double(fv);
                    found = true;
                }
            if (!found) os << "nan";
        }
        os << ',' << format_double(s.margin) << ',' << s.status << ',' << (s.ok ? 1 : 0) << '\n';
    }
}

inline std::string certificate_report(const TheoremCertificate& c) {
    return to_json(c).dump(2) + "\n";
}

}  // namespace plap
