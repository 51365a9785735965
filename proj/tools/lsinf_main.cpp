#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lsinf/commands.hpp"
#include "lsinf/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lsinf: frame-generated Lie algebroid geometry on corner charts"};
    app.set_version_flag("--version", lsinf::kVersion);
    app.require_subcommand(1);

    lsinf::CommandOptions opt;
    std::string probe_kind;

    auto add_common = [&](CLI::App* sub, bool config_required = true) {
        auto* c = sub->add_option("--config", opt.config_path, "structure-definition file");
        if (config_required) c->required();
        sub->add_option("--out", opt.out_dir, "output directory (default: out)");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--dt", opt.dt, "override the integrator step");
        sub->add_flag("--quick", opt.quick, "reduced sampling for smoke runs");
    };

    auto* validate = app.add_subcommand("validate", "check the structure axioms");
    add_common(validate);
    auto* curvature = app.add_subcommand("curvature", "curvature norms and boundedness verdicts");
    add_common(curvature);
    auto* geodesic = app.add_subcommand("geodesic", "integrate the configured geodesic");
    add_common(geodesic);
    auto* probe = app.add_subcommand("probe", "injectivity/volume/adjoint probes");
    probe->add_option("kind", probe_kind, "controlled|cvfe|lce|injectivity|volume|adjoint")
        ->required();
    add_common(probe);
    auto* dirac = app.add_subcommand("dirac-check", "Dirac operator identities");
    add_common(dirac);
    auto* suite = app.add_subcommand("suite", "run the acceptance battery");
    add_common(suite, /*config_required=*/false);
    double tol = 0.0;
    suite->add_option("--tol", tol, "override every residual tolerance (flags tolerance-induced "
                                    "failures)");

    CLI11_PARSE(app, argc, argv);

    return lsinf::run_command(
        [&]() -> int {
            if (validate->parsed()) return lsinf::cmd_validate(opt, std::cout);
            if (curvature->parsed()) return lsinf::cmd_curvature(opt, std::cout);
            if (geodesic->parsed()) return lsinf::cmd_geodesic(opt, std::cout);
            if (probe->parsed()) return lsinf::cmd_probe(probe_kind, opt, std::cout);
            if (dirac->parsed()) return lsinf::cmd_dirac_check(opt, std::cout);
            if (suite->parsed()) {
                if (tol != 0.0) opt.tol = tol;
                return lsinf::cmd_suite(opt, std::cout);
            }
            return lsinf::kExitConfigError;
        },
        std::cerr);
}
