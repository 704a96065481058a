#include "elastoborn/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "elastoborn/field_io.hpp"
#include "elastoborn/identity.hpp"
#include "elastoborn/iso.hpp"
#include "elastoborn/parallel.hpp"

namespace elastoborn {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

const char* rule_name(RayRule r) { return r == RayRule::upwind ? "upwind" : "fourier"; }
const char* g2_name(G2Orientation g) { return g == G2Orientation::literal ? "literal" : "theta_cross_alpha"; }

void write_json(const fs::path& p, const json& j) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

double field_norm(const AnyField& f) {
    return std::visit([](const auto& x) { return norm(x); }, f);
}

void write_any(const fs::path& dir, const std::string& name, const AnyField& f) {
    std::visit([&](const auto& x) { write_field(dir, name, x); }, f);
}

DataFunctionalOptions iso_options(const RunConfig& cfg) {
    DataFunctionalOptions o;
    o.rule = cfg.iso_rule;
    o.g2 = cfg.g2;
    return o;
}

std::optional<Axis> alpha_for(const RunConfig& cfg) {
    if (cfg.channel[0] == 's') return cfg.alpha;
    return std::nullopt;
}

// forward ---------------------------------------------------------------

bool forward_expansion(const RunConfig& cfg, json& rep) {
    const Perturbation P = generate_perturbation(cfg.perturbation, cfg.grid);
    const Channel ch = parse_channel(cfg.channel, cfg.theta, alpha_for(cfg));
    const ExpansionResult E = expand(P, cfg.background, ch, {cfg.rule, cfg.backend});
    const fs::path out(cfg.out);
    json coeffs = json::object();
    for (const auto& c : E.coefficients) {
        write_any(out, ch.name() + "_" + c.name, c.field);
        coeffs[c.name] = {{"singularity", c.singularity}, {"norm", field_norm(c.field)}};
    }
    write_any(out, ch.name() + "_front", E.front_identity);
    bool pass = true;
    json res = json::object();
    for (const auto& [k, v] : E.residuals) {
        res[k] = v;
        pass = pass && v <= cfg.identity_tolerance;
    }
    rep["channel"] = ch.name();
    rep["coefficients"] = coeffs;
    rep["residuals"] = res;
    rep["tolerance"] = cfg.identity_tolerance;
    rep["norms"] = {{"front_identity", field_norm(E.front_identity)}};
    return pass;
}

bool forward_iso(const RunConfig& cfg, json& rep) {
    const Perturbation P = generate_perturbation(cfg.perturbation, cfg.grid);
    if (!P.iso) throw Error("forward --iso needs an isotropic perturbation (mode isotropic, or random with random_isotropic)");
    const auto& [lam, mu] = *P.iso;
    const auto opt = iso_options(cfg);
    const auto Dp = data_functional_p(lam, mu, P.rho, cfg.background, cfg.theta, opt);
    const auto Ds = data_functional_s(lam, mu, P.rho, cfg.background, cfg.theta, cfg.alpha, opt);
    const fs::path out(cfg.out);
    write_field(out, "Dp", Dp.scalar());
    write_field(out, "Ds", Ds.vector());
    for (int r = 0; r < 3; ++r) {
        write_field(out, "Dp_F" + std::to_string(r), Dp.sources->F[r]);
        write_field(out, "Ds_G" + std::to_string(r), Ds.sources->G[r]);
    }
    write_field(out, "truth_lambda", lam);
    write_field(out, "truth_mu", mu);
    write_field(out, "truth_rho", P.rho);
    write_json(out / "iso.json", {{"N", cfg.grid.N},
                                  {"L", cfg.grid.L},
                                  {"lambda0", cfg.background.lambda0},
                                  {"mu0", cfg.background.mu0},
                                  {"theta", to_string(cfg.theta)},
                                  {"alpha", to_string(cfg.alpha)},
                                  {"rule", rule_name(opt.rule)},
                                  {"g2", g2_name(opt.g2)},
                                  {"mask_margin", Dp.mask_margin}});
    rep["norms"] = {{"Dp", norm(Dp.scalar(), {}, Region::box)},
                    {"Ds", norm(Ds.vector(), {}, Region::box)},
                    {"Dp_h4_masked", masked_sobolev_norm(Dp.scalar(), 4, Dp.mask)},
                    {"Ds_h4_masked", masked_sobolev_norm(Ds.vector(), 4, Ds.mask)},
                    {"lambda", norm(lam)},
                    {"mu", norm(mu)},
                    {"rho", norm(P.rho)}};
    return true;
}

// reconstruct -----------------------------------------------------------

json errors_json(const TripleErrors& e) { return {{"lambda", e.lambda}, {"mu", e.mu}, {"rho", e.rho}}; }

bool within(const RunConfig& cfg, const TripleErrors& e) {
    return e.lambda <= cfg.tol_lambda && e.mu <= cfg.tol_mu && e.rho <= cfg.tol_rho;
}

bool reconstruct_cmd(const RunConfig& cfg, json& rep) {
    const fs::path in(cfg.input.empty() ? cfg.out : cfg.input);
    const json meta = read_json_file(in / "iso.json");
    const Background bg(meta.at("lambda0").get<double>(), meta.at("mu0").get<double>());
    if (bg.lambda0 != cfg.background.lambda0 || bg.mu0 != cfg.background.mu0)
        throw Error(in.string() + "/iso.json: background differs from the config");

    DataFunctionalOptions opt;
    opt.rule = meta.at("rule").get<std::string>() == "upwind" ? RayRule::upwind : RayRule::fourier;
    opt.g2 = meta.at("g2").get<std::string>() == "literal" ? G2Orientation::literal : G2Orientation::theta_cross_alpha;

    DataFunctional Dp, Ds;
    Dp.kind = Mode::P;
    Ds.kind = Mode::S;
    Dp.theta = Ds.theta = parse_axis(meta.at("theta").get<std::string>());
    Dp.alpha = Ds.alpha = parse_axis(meta.at("alpha").get<std::string>());
    Dp.options = Ds.options = opt;
    Dp.field = read_field(in / "Dp");
    Ds.field = read_vector_field(in, "Ds");
    const Grid g = Dp.scalar().grid;
    Dp.mask_margin = Ds.mask_margin = meta.value("mask_margin", kDataMaskMargin);
    Dp.mask = Ds.mask = interior_mask(g, Dp.mask_margin);

    bool have_sources = true;
    for (int r = 0; r < 3; ++r)
        have_sources = have_sources && field_exists(in, "Dp_F" + std::to_string(r)) &&
                       field_exists(in, "Ds_G" + std::to_string(r) + "_1");
    if (have_sources && cfg.use_sources) {
        SourceTriple sp, ss;
        sp.kind = Mode::P;
        ss.kind = Mode::S;
        for (int r = 0; r < 3; ++r) {
            sp.F[r] = read_field(in / ("Dp_F" + std::to_string(r)));
            ss.G[r] = read_vector_field(in, "Ds_G" + std::to_string(r));
        }
        Dp.sources = std::move(sp);
        Ds.sources = std::move(ss);
    }
    ReconstructOptions ro;
    ro.use_sources = cfg.use_sources;
    const auto R = reconstruct(Dp, Ds, bg, ro);
    const fs::path out(cfg.out);
    write_field(out, "lambda", R.lambda);
    write_field(out, "mu", R.mu);
    write_field(out, "rho", R.rho);
    rep["route"] = Dp.sources ? "sources" : "materialized";
    rep["warnings"] = R.warnings;
    rep["norms"] = {{"lambda", norm(R.lambda)}, {"mu", norm(R.mu)}, {"rho", norm(R.rho)}};
    if (field_exists(in, "truth_lambda")) {
        const auto e = triple_errors(R, read_field(in / "truth_lambda"), read_field(in / "truth_mu"),
                                     read_field(in / "truth_rho"));
        rep["errors"] = errors_json(e);
        return within(cfg, e);
    }
    rep["errors"] = nullptr;
    return true;
}

bool roundtrip_cmd(const RunConfig& cfg, json& rep) {
    const Grid g(cfg.roundtrip_n, cfg.grid.L);
    const auto opt = iso_options(cfg);
    ReconstructOptions ro;
    ro.use_sources = cfg.use_sources;
    TripleErrors worst;
    json runs = json::array();
    bool pass = true;
    for (int k = 0; k < cfg.roundtrip_count; ++k) {
        const std::uint64_t seed = cfg.roundtrip_seed + std::uint64_t(k);
        const IsoTriple t = random_triple(g, seed);
        const auto Dp = data_functional_p(t.lambda, t.mu, t.rho, cfg.background, {0, 1}, opt);
        const auto Ds = data_functional_s(t.lambda, t.mu, t.rho, cfg.background, {0, 1}, {1, 1}, opt);
        const auto R = reconstruct(Dp, Ds, cfg.background, ro);
        const auto e = triple_errors(R, t.lambda, t.mu, t.rho);
        const fs::path dir = fs::path(cfg.out) / ("roundtrip_seed" + std::to_string(seed));
        write_field(dir, "lambda", R.lambda);
        write_field(dir, "mu", R.mu);
        write_field(dir, "rho", R.rho);
        runs.push_back({{"seed", seed}, {"errors", errors_json(e)}, {"warnings", R.warnings}});
        worst.lambda = std::max(worst.lambda, e.lambda);
        worst.mu = std::max(worst.mu, e.mu);
        worst.rho = std::max(worst.rho, e.rho);
        pass = pass && within(cfg, e);
    }
    rep["N"] = g.N;
    rep["prng"] = kPrngName;
    rep["errors"] = errors_json(worst);
    rep["tolerance"] = {{"lambda", cfg.tol_lambda}, {"mu", cfg.tol_mu}, {"rho", cfg.tol_rho}};
    rep["runs"] = runs;
    return pass;
}

// kernel-test -------------------------------------------------------------

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

bool kernel_cmd(const RunConfig& cfg, json& rep) {
    const auto xs = sphere_samples(cfg.kernel_samples, cfg.kernel_seed);
    const auto K = kernel_certificate(xs, cfg.background, cfg.kernel_tolerance, cfg.families);
    std::vector<std::vector<EliminationStep>> steps(xs.size());
    parallel_for(xs.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            steps[i] = elimination_replay(xs[i], cfg.background, cfg.families, cfg.elimination_tolerance);
    });

    fs::create_directories(cfg.out);
    const fs::path csv = fs::path(cfg.out) / "kernel_test.csv";
    std::ofstream out(csv);
    if (!out) throw Error("cannot write " + csv.string());
    out << "xi1,xi2,xi3,sigma_min";
    if (!steps.empty())
        for (const auto& s : steps[0]) out << "," << csv_cell(s.name);
    out << "\n" << std::setprecision(17);
    bool elim_pass = true;
    std::vector<double> worst(steps.empty() ? 0 : steps[0].size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << xs[i].xi[0] << "," << xs[i].xi[1] << "," << xs[i].xi[2] << "," << K.samples[i].sigma_min;
        for (std::size_t k = 0; k < steps[i].size(); ++k) {
            out << "," << steps[i][k].residual;
            worst[k] = std::max(worst[k], steps[i][k].residual);
            elim_pass = elim_pass && steps[i][k].pass;
        }
        out << "\n";
    }
    json ew = json::object();
    if (!steps.empty())
        for (std::size_t k = 0; k < worst.size(); ++k) ew[steps[0][k].name] = worst[k];
    rep["samples"] = xs.size();
    rep["rows"] = K.rows;
    rep["min_sigma"] = K.min_sigma;
    rep["tolerance"] = K.tolerance;
    rep["certificate_pass"] = K.pass;
    rep["elimination_tolerance"] = cfg.elimination_tolerance;
    rep["elimination_pass"] = elim_pass;
    rep["elimination_max_residual"] = ew;
    rep["csv"] = "kernel_test.csv";
    return K.pass && elim_pass;
}

// verify-identities -----------------------------------------------------

std::complex<double> dft_at(const ScalarField& f, const std::array<int, 3>& k) {
    const Grid& g = f.grid;
    const double w = M_PI / g.L;
    std::vector<std::complex<double>> e[3];
    for (int a = 0; a < 3; ++a) {
        e[a].resize(g.N);
        for (int i = 0; i < g.N; ++i) e[a][i] = std::polar(1.0, -w * k[a] * g.x(i));
    }
    std::complex<double> s = 0.0;
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j) {
            std::complex<double> row = 0.0;
            for (int l = 0; l < g.N; ++l) row += f.at(i, j, l) * e[2][l];
            s += e[0][i] * e[1][j] * row;
        }
    return s;
}

// Physical-space evaluation of every zero-data identity row against the
// symbol of the row at a few grid frequencies.
double fourier_dual_check(const Perturbation& P, const Background& bg, const IdentityOptions& fam) {
    const auto rows = identity_rows(bg, fam);
    const auto fields = evaluate_zero_data_identities(P, bg, Backend::spectral, fam);
    const std::array<std::array<int, 3>, 3> ks{{{1, 2, 3}, {2, -1, 1}, {-3, 1, 2}}};
    double worst = 0.0;
    for (const auto& k : ks) {
        std::array<std::complex<double>, kParams> hat;
        for (int c = 0; c < kParams; ++c) hat[c] = dft_at(c < kVoigtSlots ? P.C.slot(c) : P.rho, k);
        const std::array<double, 3> xi{M_PI * k[0] / P.grid().L, M_PI * k[1] / P.grid().L, M_PI * k[2] / P.grid().L};
        for (const auto& r : rows) {
            std::complex<double> sym = 0.0;
            double scale = 0.0;
            for (int c = 0; c < kParams; ++c) {
                if (r.ops[c].terms().empty()) continue;
                auto t = r.ops[c](xi) * hat[c];
                sym += t;
                scale += std::abs(t);
            }
            const auto phys = dft_at(fields.at(r.label), k);
            if (scale > 0.0) worst = std::max(worst, std::abs(phys - sym) / scale);
        }
    }
    return worst;
}

bool verify_cmd(const RunConfig& cfg, json& rep) {
    const Perturbation P = generate_perturbation(cfg.perturbation, cfg.grid);
    const ExpansionOptions eo{cfg.rule, cfg.backend};
    json ch = json::object();
    bool pass = true;
    double worst = 0.0;
    const double in = [&] {
        double s = norm(P.rho);
        for (int k = 0; k < kVoigtSlots; ++k) s += norm(P.C.slot(k));
        return s;
    }();
    for (const char* name : {"pp", "sp", "ps", "ss"}) {
        const Channel c = parse_channel(name, cfg.theta, name[0] == 's' ? std::optional<Axis>(cfg.alpha) : std::nullopt);
        const auto E = expand(P, cfg.background, c, eo);
        json r = json::object();
        for (const auto& [k, v] : E.residuals) {
            r[k] = v;
            worst = std::max(worst, v);
            pass = pass && v <= cfg.identity_tolerance;
        }
        json entry = {{"residuals", r}};
        if (P.iso && (c.name() == "sp" || c.name() == "ps")) {
            const double lead = field_norm(E.coefficients.front().field) / std::max(in, 1e-300);
            entry["leading_coefficient_relative"] = lead;
            pass = pass && lead <= 1e-12;
        }
        ch[name] = entry;
    }
    const double dual = fourier_dual_check(P, cfg.background, cfg.families);
    pass = pass && dual <= 1e-10;
    rep["channels"] = ch;
    rep["max_residual"] = worst;
    rep["tolerance"] = cfg.identity_tolerance;
    rep["fourier_dual_max"] = dual;
    rep["isotropic"] = bool(P.iso);
    return pass;
}

// stability ----------------------------------------------------------------

bool stability_cmd(const RunConfig& cfg, json& rep) {
    const Grid g(cfg.stability_n, cfg.grid.L);
    const auto S = stability_ratio(cfg.stability_samples, cfg.stability_seed, cfg.background, g, iso_options(cfg));
    json samples = json::array();
    for (const auto& s : S.samples)
        samples.push_back({{"seed", s.seed},
                           {"input_norm", s.input_norm},
                           {"data_norm", s.data_norm},
                           {"ratio", s.ratio},
                           {"scaled_ratio", s.scaled_ratio}});
    rep["N"] = g.N;
    rep["prng"] = kPrngName;
    rep["max_ratio"] = S.max_ratio;
    rep["median_ratio"] = S.median_ratio;
    rep["max_homogeneity_dev"] = S.max_homogeneity_dev;
    rep["min_data_to_input"] = S.min_data_to_input;
    rep["homogeneity_tolerance"] = cfg.homogeneity_tolerance;
    rep["min_data_ratio"] = cfg.min_data_ratio;
    rep["norms"] = {{"input", "H4 on omega"}, {"data", "H4 surrogate on mask and omega"}};
    rep["samples"] = samples;
    return S.max_homogeneity_dev <= cfg.homogeneity_tolerance && S.min_data_to_input >= cfg.min_data_ratio;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"forward", "reconstruct", "roundtrip", "kernel-test",
                                                "verify-identities", "stability"};
    return names;
}

int run(const std::string& command, const RunConfig& cfg, std::ostream& log) {
    const auto t0 = Clock::now();
    json rep = {{"command", command}};
    bool pass = false;
    try {
        validate(cfg);
        fs::create_directories(cfg.out);
        {
            std::ofstream ec(fs::path(cfg.out) / "effective_config.json");
            ec << effective_config(cfg) << "\n";
        }
        if (command == "forward") pass = cfg.iso ? forward_iso(cfg, rep) : forward_expansion(cfg, rep);
        else if (command == "reconstruct") pass = reconstruct_cmd(cfg, rep);
        else if (command == "roundtrip") pass = roundtrip_cmd(cfg, rep);
        else if (command == "kernel-test") pass = kernel_cmd(cfg, rep);
        else if (command == "verify-identities") pass = verify_cmd(cfg, rep);
        else if (command == "stability") pass = stability_cmd(cfg, rep);
        else throw Error("unknown command '" + command + "'");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitError;
    }
    rep["pass"] = pass;
    rep["threads"] = thread_count();
    rep["runtime"] = {{"seconds", std::chrono::duration<double>(Clock::now() - t0).count()}};
    std::string file = command;
    std::replace(file.begin(), file.end(), '-', '_');
    try {
        write_json(fs::path(cfg.out) / (file + ".json"), rep);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitError;
    }
    log << command << ": " << (pass ? "PASS" : "FAIL") << " (" << (fs::path(cfg.out) / (file + ".json")).string()
        << ")\n";
    return pass ? kExitPass : kExitFail;
}

std::string strip_timing(const std::string& report_json) {
    json j = json::parse(report_json);
    j.erase("runtime");
    j.erase("threads");
    return j.dump();
}

}  // namespace elastoborn
