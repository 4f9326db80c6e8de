#include <cstdlib>
#include <initializer_list>
#include <string>

#include <CLI11.hpp>

#include "blens/cli.hpp"

int main(int argc, char** argv) {
    blens::ExperimentConfig cfg;

    CLI::App app{"billiard-lens batch runner: every command writes a JSON report plus CSV artifacts"};
    app.fallthrough();
    app.add_option("--config", cfg.config_path, "JSON file of named parameters");
    app.add_option("--out", cfg.out_dir, "output directory (default .)");
    bool threads_given = false;
    app.add_option_function<unsigned>(
           "--threads", [&](unsigned v) { cfg.threads = v; threads_given = true; },
           "worker count (default: BILLIARD_LENS_THREADS, then hardware)");
    app.add_option("--seed", cfg.seed, "seed recorded in every report");

    auto with_keys = [&](CLI::App* sub, std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
            const std::string key = k;
            sub->add_option_function<std::string>(
                "--" + key, [&cfg, key](const std::string& v) { cfg.overrides[key] = v; });
        }
        sub->parse_complete_callback([&cfg, sub] { cfg.command = sub->get_name(); });
        return sub;
    };

    with_keys(app.add_subcommand("shell", "enumerate one lattice shell"), {"mu", "polygon"});
    with_keys(app.add_subcommand("kernel", "shell kernels against the radial limit"),
              {"mus", "R", "grid", "polygon"});
    with_keys(app.add_subcommand("localize", "window localization of a translate target"),
              {"polygon", "bc", "shell", "z0", "window", "k", "grid-step", "error-radius"});
    with_keys(app.add_subcommand("fixed", "symmetric localization at a rational base point"),
              {"polygon", "bc", "shell", "z0r", "error-radius"});
    auto* lp = with_keys(app.add_subcommand("lattice-polygon", "unfolded four-cell localization"),
                         {"bc", "shell", "z0", "window", "error-radius"});
    lp->add_flag_callback("--roaming", [&cfg] { cfg.overrides["roaming"] = "1"; });
    with_keys(app.add_subcommand("obstruct-rect", "rectangle jet constraint residual"),
              {"polygon", "bc", "z0", "threshold", "source", "modes", "shell"});
    with_keys(app.add_subcommand("obstruct-disk", "disk radial constraint residual"),
              {"source", "t", "l", "d", "mode", "bc", "r0", "theta0", "R", "M", "threshold"});
    with_keys(app.add_subcommand("obstruct-robin", "plane wave span distance of a Robin window"),
              {"sigma", "modes", "z0", "radius", "step", "restarts", "threshold"});
    with_keys(app.add_subcommand("robin-freqs", "Robin frequency ladder"), {"sigma", "count"});
    with_keys(app.add_subcommand("nodal", "nodal portrait of a localized window"),
              {"polygon", "bc", "shell", "z0", "window", "k", "grid-step", "radius", "step"});
    with_keys(app.add_subcommand("covariance", "empirical window covariance against the radial limit"),
              {"mu", "bc", "samples", "probes", "radius"});
    with_keys(app.add_subcommand("genus", "translation surface genus of a rational polygon"),
              {"angles"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!threads_given) {
        if (const char* env = std::getenv("BILLIARD_LENS_THREADS")) {
            char* end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end && *end == '\0') cfg.threads = static_cast<unsigned>(v);
        }
    }
    return blens::run_experiment(cfg);
}
