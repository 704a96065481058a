#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "elastoborn/config.hpp"
#include "elastoborn/run.hpp"

using namespace elastoborn;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::optional<std::string> channel;
    std::optional<int> n;
    bool iso = false;
};

void apply(const std::string& cmd, const Overrides& o, RunConfig& cfg) {
    if (o.out) cfg.out = *o.out;
    if (o.iso) cfg.iso = true;
    if (o.channel) cfg.channel = *o.channel;
    if (cmd == "kernel-test") {
        if (o.samples) cfg.kernel_samples = *o.samples;
        if (o.seed) cfg.kernel_seed = *o.seed;
        if (o.tolerance) cfg.kernel_tolerance = *o.tolerance;
    } else if (cmd == "roundtrip") {
        if (o.seed) cfg.roundtrip_seed = *o.seed;
        if (o.n) cfg.roundtrip_n = *o.n;
    } else if (cmd == "stability") {
        if (o.samples) cfg.stability_samples = *o.samples;
        if (o.seed) cfg.stability_seed = *o.seed;
    } else if (cmd == "verify-identities" || cmd == "forward") {
        if (o.tolerance) cfg.identity_tolerance = *o.tolerance;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Born-linearized elastic scattering: forward expansions, zero-data identities, isotropic inversion"};
    app.require_subcommand(1);
    Overrides o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory (overrides the config)");
    };

    auto* fwd = app.add_subcommand("forward", "progressive-wave coefficients, or data functionals with --iso");
    common(fwd);
    fwd->add_option("--channel", o.channel, "pp, sp, ps or ss")->check(CLI::IsMember({"pp", "sp", "ps", "ss"}));
    fwd->add_flag("--iso", o.iso, "write D_p, D_s and their sources for an isotropic triple");
    fwd->add_option("--tolerance", o.tolerance, "residual tolerance");

    auto* rec = app.add_subcommand("reconstruct", "recover (lambda, mu, rho) from forward --iso output");
    common(rec);

    auto* rt = app.add_subcommand("roundtrip", "random isotropic triples through forward and reconstruct");
    common(rt);
    rt->add_option("--seed", o.seed, "first seed");
    rt->add_option("--n", o.n, "grid size")->check(CLI::Range(8, 1024));

    auto* kt = app.add_subcommand("kernel-test", "sigma_min certificate and elimination replay on the sphere");
    common(kt);
    kt->add_option("--samples", o.samples, "frequency samples")->check(CLI::PositiveNumber);
    kt->add_option("--seed", o.seed, "digital-shift seed");
    kt->add_option("--tolerance", o.tolerance, "sigma_min threshold");

    auto* vi = app.add_subcommand("verify-identities", "expansion residuals in all channels");
    common(vi);
    vi->add_option("--tolerance", o.tolerance, "residual tolerance");

    auto* st = app.add_subcommand("stability", "stability ratio over random triples");
    common(st);
    st->add_option("--samples", o.samples, "number of triples")->check(CLI::Range(10, 10000));
    st->add_option("--seed", o.seed, "first seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = load_config(o.config);
        apply(cmd, o, cfg);
        // overrides go through the parser again so they get the same checks
        cfg = parse_config_text(effective_config(cfg), o.config + " (with command-line overrides)");
        return run(cmd, cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
