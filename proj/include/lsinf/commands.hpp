#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lsinf/suite.hpp"

namespace lsinf {

// Exit-code contract: 0 pass, 1 property failure, 2 config error,
// 3 runtime/numeric error.
enum ExitCode { kExitOk = 0, kExitPropertyFailure = 1, kExitConfigError = 2, kExitRuntimeError = 3 };

struct CommandOptions {
    std::string config_path;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;  // 0 = take from config
    double dt = 0.0;         // 0 = take from config
    std::optional<double> tol;
    bool quick = false;
};

namespace cmd_detail {

struct LoadedConfig {
    std::string bytes;
    StructureConfig cfg;
    StructureInstance inst;
};

inline LoadedConfig load(const CommandOptions& opt) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + opt.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    StructureConfig cfg = parse_structure_config(bytes);
    if (opt.seed != 0) cfg.seed = opt.seed;
    if (opt.dt != 0.0) cfg.dt = opt.dt;
    StructureInstance inst = instantiate(cfg);
    return {std::move(bytes), std::move(cfg), std::move(inst)};
}

inline json verdict_json(const AxiomVerdict& v) {
    json j;
    j["pass"] = v.pass;
    j["detail"] = v.detail;
    return j;
}

}  // namespace cmd_detail

/// `validate`: run the structure axioms, write validate.json.
inline int cmd_validate(const CommandOptions& opt, std::ostream& log) {
    auto lc = cmd_detail::load(opt);
    SamplingPlan plan;
    plan.seed = lc.cfg.seed;
    if (opt.quick) plan.interior_samples = 10;
    ValidationReport rep = validate(lc.inst.algebroid, plan);
    json j = report_header(lc.bytes, lc.cfg.seed);
    j["structure"] = lc.inst.algebroid.name;
    j["axioms"]["tangency"] = cmd_detail::verdict_json(rep.tangency);
    j["axioms"]["closure"] = cmd_detail::verdict_json(rep.closure);
    j["axioms"]["smoothness"] = cmd_detail::verdict_json(rep.smoothness);
    if (rep.lie_structure_checked)
        j["axioms"]["anchor_invertibility"] = cmd_detail::verdict_json(rep.invertibility);
    j["all_pass"] = rep.all_pass();
    std::filesystem::create_directories(opt.out_dir);
    write_json(opt.out_dir / "validate.json", j);
    log << (rep.all_pass() ? "validate: all axioms pass\n" : "validate: FAILURES, see report\n");
    return rep.all_pass() ? kExitOk : kExitPropertyFailure;
}

/// `curvature`: sample R, nablaR, nabla2R norms, write CSV + verdict JSON.
inline int cmd_curvature(const CommandOptions& opt, std::ostream& log) {
    auto lc = cmd_detail::load(opt);
    const Algebroid& a = lc.inst.algebroid;
    if (!a.square())
        throw std::domain_error(
            "curvature: structure rank < chart dimension (e.g. the adiabatic structure is "
            "structural but not a Lie structure at infinity); curvature reports need a square "
            "anchor");
    Rng rng(lc.cfg.seed);
    std::filesystem::create_directories(opt.out_dir);
    CsvWriter csv(opt.out_dir / "curvature.csv");
    std::vector<std::string> header = {"sample"};
    for (int i = 0; i < a.dim(); ++i) header.push_back(a.chart.coord_name(i));
    header.insert(header.end(), {"norm_R", "norm_nablaR", "norm_nabla2R", "sectional_12"});
    csv.row(header);
    const int samples = opt.quick ? 8 : 40;
    for (int s = 0; s < samples; ++s) {
        ChartPoint p = detail::random_interior_point(a.chart, rng, 0.05, 0.95);
        auto R = nabla_k_curvature(a, lc.inst.metric, p, 0);
        auto n1 = nabla_k_curvature(a, lc.inst.metric, p, 1);
        auto n2 = nabla_k_curvature(a, lc.inst.metric, p, 2);
        // sectional curvature of the (X_1, X_2) plane
        MatD G = metric_values(lc.inst.metric, p);
        double low = 0.0;
        for (int l = 0; l < static_cast<int>(a.rank); ++l) low += R.at({l, 1, 0, 1}) * G(l, 0);
        double g11 = G(0, 0), g22 = G(1, 1), g12 = G(0, 1);
        double sect = low / (g11 * g22 - g12 * g12);
        std::vector<std::string> row = {std::to_string(s)};
        for (int i = 0; i < a.dim(); ++i) row.push_back(fmt_double(p.x[i]));
        row.push_back(fmt_double(R.sup_norm()));
        row.push_back(fmt_double(n1.sup_norm()));
        row.push_back(fmt_double(n2.sup_norm()));
        row.push_back(fmt_double(sect));
        csv.row(row);
    }
    json j = report_header(lc.bytes, lc.cfg.seed);
    j["structure"] = a.name;
    j["boundedness"] = json::array();
    bool all_bounded = true;
    for (auto q : {CurvatureQuantity::R, CurvatureQuantity::NablaR, CurvatureQuantity::Nabla2R})
        for (int face = 1; face <= a.chart.corner_codim(); ++face) {
            auto rep = boundedness_probe(a, lc.inst.metric, q, face, rng, 2, opt.quick ? 12 : 24, 2);
            json e;
            e["quantity"] = quantity_name(q);
            e["face"] = face;
            e["max_norm"] = rep.max_norm;
            e["log_slope"] = rep.slope;
            e["deepest_level"] = rep.deepest_level;
            e["bounded"] = rep.bounded;
            j["boundedness"].push_back(e);
            all_bounded = all_bounded && rep.bounded;
        }
    j["all_bounded"] = all_bounded;
    write_json(opt.out_dir / "curvature.json", j);
    log << "curvature: wrote curvature.csv and curvature.json\n";
    return all_bounded ? kExitOk : kExitPropertyFailure;
}

/// `geodesic`: integrate the configured initial state, write trajectory CSV.
inline int cmd_geodesic(const CommandOptions& opt, std::ostream& log) {
    auto lc = cmd_detail::load(opt);
    const Algebroid& a = lc.inst.algebroid;
    if (lc.cfg.start.size() != static_cast<std::size_t>(a.dim()))
        throw config_error("geodesic: config [geodesic] start must have chart dimension entries");
    if (lc.cfg.direction.size() != a.rank)
        throw config_error("geodesic: config [geodesic] direction must have rank entries");
    if (!(lc.cfg.dt > 0.0)) throw config_error("geodesic: dt must be positive");
    GeodesicState s0 = make_state(a, lc.inst.metric, ChartPoint{lc.cfg.start}, lc.cfg.direction);
    Trajectory traj = integrate(a, lc.inst.metric, s0, lc.cfg.T, lc.cfg.dt);
    std::filesystem::create_directories(opt.out_dir);
    CsvWriter csv(opt.out_dir / "trajectory.csv");
    std::vector<std::string> header = {"t"};
    for (int i = 0; i < a.dim(); ++i) header.push_back(a.chart.coord_name(i));
    for (std::size_t i = 0; i < a.rank; ++i) header.push_back("v" + std::to_string(i + 1));
    header.insert(header.end(), {"norm_drift", "boundary_depth"});
    csv.row(header);
    for (const auto& tp : traj.points) {
        std::vector<std::string> row = {fmt_double(tp.t)};
        for (int i = 0; i < a.dim(); ++i) row.push_back(fmt_double(tp.s.p.x[i]));
        for (std::size_t i = 0; i < a.rank; ++i) row.push_back(fmt_double(tp.s.v[i]));
        row.push_back(fmt_double(tp.drift));
        row.push_back(std::to_string(tp.boundary_depth));
        csv.row(row);
    }
    json j = report_header(lc.bytes, lc.cfg.seed);
    j["status"] = traj.status == FlowStatus::Ok
                      ? "ok"
                      : (traj.status == FlowStatus::UnderflowAbort ? "underflow_abort"
                                                                   : "drift_reject");
    j["abort_step"] = traj.abort_step;
    j["message"] = traj.message;
    j["depth_invariant"] = boundary_depth_invariance(traj);
    write_json(opt.out_dir / "geodesic.json", j);
    log << "geodesic: " << traj.points.size() << " states written\n";
    if (traj.status != FlowStatus::Ok) return kExitRuntimeError;
    return boundary_depth_invariance(traj) ? kExitOk : kExitPropertyFailure;
}

/// `probe <kind>`: the injectivity-radius and volume probes.
inline int cmd_probe(const std::string& kind, const CommandOptions& opt, std::ostream& log) {
    auto lc = cmd_detail::load(opt);
    const Algebroid& a = lc.inst.algebroid;
    const MetricOnA& g = lc.inst.metric;
    Rng rng(lc.cfg.seed);
    std::filesystem::create_directories(opt.out_dir);
    json j = report_header(lc.bytes, lc.cfg.seed);
    j["probe"] = kind;
    bool ok = true;
    if (kind == "controlled") {
        j["reports"] = json::array();
        for (double x : {1e-2, 1e-4, 1e-6}) {
            ChartPoint p;
            p.x.assign(a.dim(), 0.25);
            p.x[0] = x;
            Rng sub = rng.fork();
            auto rep = controlled_check(a, g, p, 0.1, 8, 8, sub);
            json e;
            e["x1"] = x;
            e["ratio"] = rep.ratio;
            e["points"] = rep.points_sampled;
            e["coverage"] = rep.coverage;
            j["reports"].push_back(e);
        }
    } else if (kind == "cvfe") {
        j["directions"] = json::array();
        for (int d = 0; d < a.dim(); ++d) {
            std::vector<double> v(a.dim(), 0.0);
            v[d] = 1.0;
            auto rep = cvfe_check(a, g, 1, v);
            json e;
            e["direction"] = a.chart.coord_name(d);
            e["pass"] = rep.pass;
            e["final_diff"] = rep.diffs.empty() ? 0.0 : rep.diffs.back();
            j["directions"].push_back(e);
            ok = ok && rep.pass;
        }
    } else if (kind == "lce") {
        // candidate forms from config [probe] lce_forms, default b-style
        std::vector<std::vector<Expr>> cands;
        auto t = lc.cfg.raw.find("probe");
        if (t != lc.cfg.raw.end() && t->second.count("lce_forms")) {
            for (const auto& row : t->second.at("lce_forms").array()) {
                std::vector<Expr> r;
                for (const auto& cell : row.array()) r.push_back(a.chart.parse(cell.str()));
                cands.push_back(std::move(r));
            }
        } else {
            for (std::size_t i = 0; i < a.rank; ++i) {
                std::vector<Expr> r(a.dim(), Expr::number(0.0));
                if (static_cast<int>(i) < a.chart.corner_codim())
                    r[i] = a.chart.parse("1/" + a.chart.coord_name(i));
                else
                    r[i] = Expr::number(1.0);
                cands.push_back(std::move(r));
            }
        }
        auto rep = lce_check(a, g, cands);
        j["closed"] = rep.closed;
        j["max_closedness_residual"] = rep.max_closedness_residual;
        j["spanning"] = rep.spanning;
        j["worst_condition"] = rep.worst_condition;
        j["pass"] = rep.pass;
        ok = rep.pass;
    } else if (kind == "injectivity") {
        ChartPoint p;
        p.x.assign(a.dim(), 0.25);
        p.x[0] = 0.01;
        auto rep = injectivity_probe(a, g, p, 1.0, opt.quick ? 6 : 12, rng);
        j["r_max"] = rep.r_max;
        j["validated_radius"] = rep.validated_radius;
        j["n_dirs"] = rep.n_dirs;
        j["note"] = rep.note;
        ok = rep.validated_radius > 0.0;
    } else if (kind == "volume") {
        std::vector<int> levels;
        for (int m = 4; m <= (opt.quick ? 8 : 14); ++m) levels.push_back(m);
        auto rep = volume_probe(a, g, Expr::number(1.0), levels);
        j["rows"] = json::array();
        for (auto& r : rep.rows) {
            json e;
            e["level"] = r.level;
            e["integral"] = r.integral;
            j["rows"].push_back(e);
        }
        j["normalized_slope"] = rep.normalized_slope;
        j["diverges"] = rep.diverges;
    } else if (kind == "adjoint") {
        Box support;
        support.lo.assign(a.dim(), -0.4);
        support.hi.assign(a.dim(), 0.4);
        support.lo[0] = 0.25;
        support.hi[0] = 0.85;
        std::vector<Expr> coeffs(a.rank, Expr::number(0.0));
        coeffs[0] = Expr::number(1.0);
        auto rep = adjoint_identity_check(a, g, coeffs, Bump{support}, opt.quick ? 48 : 160);
        j["lhs"] = rep.lhs;
        j["rhs"] = rep.rhs;
        j["residual"] = rep.residual;
        ok = rep.residual < 1e-3;
    } else {
        throw config_error("unknown probe kind: " + kind);
    }
    write_json(opt.out_dir / ("probe_" + kind + ".json"), j);
    log << "probe " << kind << ": report written\n";
    return ok ? kExitOk : kExitPropertyFailure;
}

/// `dirac-check`: operator identities at configured sample points.
inline int cmd_dirac_check(const CommandOptions& opt, std::ostream& log) {
    auto lc = cmd_detail::load(opt);
    const Algebroid& a = lc.inst.algebroid;
    if (a.rank != 2 && a.rank != 3)
        throw config_error("dirac-check: spinor representation needs rank 2 or 3");
    Rng rng(lc.cfg.seed);
    CliffordRep rep = clifford_rep(static_cast<int>(a.rank));
    json j = report_header(lc.bytes, lc.cfg.seed);
    double worst_symbol = 0.0;
    for (int s = 0; s < 10; ++s) {
        ChartPoint p = detail::random_interior_point(a.chart, rng, 0.1, 0.9);
        std::vector<double> xi(a.rank);
        for (auto& c : xi) c = rng.uniform(-1.0, 1.0);
        double nz = 0.0;
        for (double c : xi) nz += c * c;
        if (nz == 0.0) xi[0] = 1.0;
        MatD G = metric_values(lc.inst.metric, p);
        MatD Gi = inverse(G);
        double want = 0.0;
        for (std::size_t i = 0; i < a.rank; ++i)
            for (std::size_t jj = 0; jj < a.rank; ++jj) want += xi[i] * Gi(i, jj) * xi[jj];
        want = std::sqrt(want);
        worst_symbol = std::max(
            worst_symbol, std::abs(symbol_sigma_min(rep, lc.inst.metric, p, xi) - want));
    }
    j["symbol_identity_residual"] = worst_symbol;
    bool ok = worst_symbol < 1e-12;
    if (a.rank == 2) {
        std::vector<std::array<Expr, 4>> sections = {
            {Expr::number(1.0), Expr::number(0.0), Expr::number(0.0), Expr::number(0.0)},
            {a.chart.parse("y1"), a.chart.parse("x1"), Expr::number(1.0), a.chart.parse("x1*y1")}};
        double worst = 0.0;
        for (int s = 0; s < 5; ++s) {
            ChartPoint p = detail::random_interior_point(a.chart, rng, 0.2, 0.9);
            worst = std::max(worst, dirac_is_drham_residual(a, lc.inst.metric, sections, p));
        }
        j["drham_residual"] = worst;
        ok = ok && worst < 1e-8;
    }
    j["pass"] = ok;
    std::filesystem::create_directories(opt.out_dir);
    write_json(opt.out_dir / "dirac.json", j);
    log << "dirac-check: report written\n";
    return ok ? kExitOk : kExitPropertyFailure;
}

/// `suite`: the acceptance battery.
inline int cmd_suite(const CommandOptions& opt, std::ostream& log) {
    SuiteOptions so;
    so.seed = opt.seed == 0 ? 1 : opt.seed;
    so.tol_override = opt.tol;
    if (opt.quick) so.scale = 0.1;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path, std::ios::binary);
        if (!in) throw config_error("cannot open config file: " + opt.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        so.config_bytes = ss.str();
        StructureConfig cfg = parse_structure_config(so.config_bytes);
        if (opt.seed == 0) so.seed = cfg.seed;
    }
    auto results = run_acceptance(so, log);
    write_suite_outputs(opt.out_dir, results, so);
    bool all = true, any_tol = false;
    for (const auto& r : results) {
        all = all && r.pass;
        any_tol = any_tol || r.tolerance_induced;
    }
    log << (all ? "suite: ALL CRITERIA PASS\n" : "suite: FAILURES\n");
    if (any_tol) log << "suite: some failures are tolerance-induced (see summary)\n";
    return all ? kExitOk : kExitPropertyFailure;
}

/// Maps exceptions to the exit-code contract.
template <typename F>
int run_command(F&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const parse_error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

}  // namespace lsinf
