#include "elastoborn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "elastoborn/field_io.hpp"

namespace elastoborn {

using nlohmann::json;

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

using Path = std::vector<std::string>;

std::string dotted(const Path& p) {
    std::string s;
    for (const auto& k : p) {
        if (!k.empty() && k[0] == '[') {
            s += k;
        } else {
            if (!s.empty()) s += '.';
            s += k;
        }
    }
    return s.empty() ? "<root>" : s;
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    // Line of the last key of `p` that can be found, walking keys in order.
    int line_of(const Path& p) const {
        std::size_t pos = 0, hit = std::string::npos;
        for (const auto& k : p) {
            if (!k.empty() && k[0] == '[') continue;
            const std::string needle = "\"" + k + "\"";
            std::size_t at = pos;
            while ((at = text_.find(needle, at)) != std::string::npos) {
                std::size_t q = at + needle.size();
                while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
                if (q < text_.size() && text_[q] == ':') break;
                at += needle.size();
            }
            if (at == std::string::npos) break;
            hit = at;
            pos = at + needle.size();
        }
        if (hit == std::string::npos) return 1;
        return 1 + int(std::count(text_.begin(), text_.begin() + std::ptrdiff_t(hit), '\n'));
    }

    [[noreturn]] void fail(const Path& p, const std::string& msg) const {
        throw ConfigError(source_, line_of(p), dotted(p) + ": " + msg);
    }

    void known_keys(const json& obj, const Path& p, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(p, "expected an object");
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!ok.count(it.key())) {
                Path q = p;
                q.push_back(it.key());
                fail(q, "unknown key");
            }
        }
    }

    double number(const json& obj, const Path& p, const char* key, double def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_number()) fail(sub(p, key), "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) fail(sub(p, key), "not finite");
        return x;
    }

    long long integer(const json& obj, const Path& p, const char* key, long long def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(sub(p, key), "expected an integer");
        return v.get<long long>();
    }

    std::uint64_t seed(const json& obj, const Path& p, const char* key, std::uint64_t def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(sub(p, key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const json& obj, const Path& p, const char* key, bool def) const {
        if (!obj.contains(key)) return def;
        if (!obj.at(key).is_boolean()) fail(sub(p, key), "expected true or false");
        return obj.at(key).get<bool>();
    }

    std::string string(const json& obj, const Path& p, const char* key, const std::string& def) const {
        if (!obj.contains(key)) return def;
        if (!obj.at(key).is_string()) fail(sub(p, key), "expected a string");
        return obj.at(key).get<std::string>();
    }

    static Path sub(Path p, const std::string& k) {
        p.push_back(k);
        return p;
    }

private:
    const std::string& text_;
    std::string source_;
};

const json& child(const json& root, const char* key) {
    static const json empty = json::object();
    return root.contains(key) ? root.at(key) : empty;
}

std::vector<BumpSpec> parse_bumps(const Reader& r, const json& v, const Path& p) {
    if (!v.is_array()) r.fail(p, "expected a list of bumps");
    std::vector<BumpSpec> out;
    for (std::size_t n = 0; n < v.size(); ++n) {
        Path q = p;
        q.push_back("[" + std::to_string(n) + "]");
        const json& b = v[n];
        r.known_keys(b, q, {"center", "radius", "amplitude"});
        BumpSpec s;
        if (b.contains("center")) {
            const json& c = b.at("center");
            if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() || !c[2].is_number())
                r.fail(Reader::sub(q, "center"), "expected three numbers");
            for (int a = 0; a < 3; ++a) s.center[a] = c[a].get<double>();
        }
        s.radius = r.number(b, q, "radius", s.radius);
        s.amplitude = r.number(b, q, "amplitude", s.amplitude);
        try {
            validate(s);
        } catch (const Error& e) {
            r.fail(q, e.what());
        }
        out.push_back(s);
    }
    return out;
}

bool component_key(const std::string& k, int& A, int& B) {
    if (k.size() != 3 || k[0] != 'c' || k[1] < '1' || k[1] > '6' || k[2] < '1' || k[2] > '6') return false;
    A = k[1] - '0';
    B = k[2] - '0';
    if (A > B) std::swap(A, B);
    return true;
}

RayRule parse_rule(const Reader& r, const Path& p, const std::string& s) {
    if (s == "upwind") return RayRule::upwind;
    if (s == "fourier") return RayRule::fourier;
    r.fail(p, "rule must be \"upwind\" or \"fourier\"");
}

const char* rule_name(RayRule r) { return r == RayRule::upwind ? "upwind" : "fourier"; }

Axis parse_axis_at(const Reader& r, const Path& p, const std::string& s) {
    try {
        return parse_axis(s);
    } catch (const std::exception& e) {
        r.fail(p, e.what());
    }
}

void parse_perturbation(const Reader& r, const json& v, RunConfig& cfg) {
    const Path p{"perturbation"};
    if (v.is_null()) return;
    r.known_keys(v, p, {"mode", "components", "isotropic", "seed", "bumps_per_component", "random_isotropic", "path"});
    auto& s = cfg.perturbation;
    const std::string mode = r.string(v, p, "mode", "none");
    if (mode == "none") s.mode = PerturbationSpec::Mode::none;
    else if (mode == "components") s.mode = PerturbationSpec::Mode::components;
    else if (mode == "isotropic") s.mode = PerturbationSpec::Mode::isotropic;
    else if (mode == "random") s.mode = PerturbationSpec::Mode::random;
    else if (mode == "files") s.mode = PerturbationSpec::Mode::files;
    else r.fail(Reader::sub(p, "mode"), "unknown mode \"" + mode + "\" (none, components, isotropic, random, files)");

    if (v.contains("components")) {
        const Path q = Reader::sub(p, "components");
        const json& c = v.at("components");
        if (!c.is_object()) r.fail(q, "expected an object");
        for (auto it = c.begin(); it != c.end(); ++it) {
            int A, B;
            std::string key = it.key();
            if (key != "rho") {
                if (!component_key(key, A, B)) r.fail(Reader::sub(q, key), "expected c<A><B> with A, B in 1..6, or rho");
                key = "c" + std::to_string(A) + std::to_string(B);
            }
            if (s.components.count(key)) r.fail(Reader::sub(q, it.key()), "duplicate of " + key);
            s.components[key] = parse_bumps(r, it.value(), Reader::sub(q, it.key()));
        }
    }
    if (v.contains("isotropic")) {
        const Path q = Reader::sub(p, "isotropic");
        const json& c = v.at("isotropic");
        r.known_keys(c, q, {"lambda", "mu", "rho"});
        for (auto it = c.begin(); it != c.end(); ++it)
            s.isotropic[it.key()] = parse_bumps(r, it.value(), Reader::sub(q, it.key()));
    }
    s.seed = r.seed(v, p, "seed", s.seed);
    s.bumps_per_component = int(r.integer(v, p, "bumps_per_component", s.bumps_per_component));
    if (s.bumps_per_component < 1 || s.bumps_per_component > 16)
        r.fail(Reader::sub(p, "bumps_per_component"), "must be in 1..16");
    s.random_isotropic = r.boolean(v, p, "random_isotropic", s.random_isotropic);
    s.path = r.string(v, p, "path", s.path);
    if (s.mode == PerturbationSpec::Mode::files && s.path.empty()) r.fail(Reader::sub(p, "path"), "required for mode files");
    if (s.mode == PerturbationSpec::Mode::components && s.components.empty())
        r.fail(Reader::sub(p, "components"), "required for mode components");
    if (s.mode == PerturbationSpec::Mode::isotropic && s.isotropic.empty())
        r.fail(Reader::sub(p, "isotropic"), "required for mode isotropic");
}

RunConfig parse(const Reader& r, const json& root) {
    RunConfig cfg;
    r.known_keys(root, {}, {"grid", "background", "perturbation", "expansion", "kernel", "identities", "iso",
                            "roundtrip", "stability", "out"});

    {
        const Path p{"grid"};
        const json& v = child(root, "grid");
        r.known_keys(v, p, {"N", "L"});
        long long N = r.integer(v, p, "N", cfg.grid.N);
        double L = r.number(v, p, "L", cfg.grid.L);
        if (N < 8 || N % 2 != 0 || N > 1024) r.fail(Reader::sub(p, "N"), "N must be even and in 8..1024");
        if (!(L > 1.0)) r.fail(Reader::sub(p, "L"), "L must exceed 1 so that omega fits in the box");
        cfg.grid = Grid(int(N), L);
    }
    {
        const Path p{"background"};
        const json& v = child(root, "background");
        r.known_keys(v, p, {"lambda0", "mu0"});
        const double l0 = r.number(v, p, "lambda0", cfg.background.lambda0);
        const double m0 = r.number(v, p, "mu0", cfg.background.mu0);
        try {
            cfg.background = Background(l0, m0);
        } catch (const std::exception& e) {
            r.fail(p, e.what());
        }
    }
    parse_perturbation(r, child(root, "perturbation"), cfg);
    {
        const Path p{"expansion"};
        const json& v = child(root, "expansion");
        r.known_keys(v, p, {"channel", "theta", "alpha", "rule", "backend"});
        cfg.channel = r.string(v, p, "channel", cfg.channel);
        if (cfg.channel != "pp" && cfg.channel != "sp" && cfg.channel != "ps" && cfg.channel != "ss")
            r.fail(Reader::sub(p, "channel"), "channel must be one of pp, sp, ps, ss");
        cfg.theta = parse_axis_at(r, Reader::sub(p, "theta"), r.string(v, p, "theta", to_string(cfg.theta)));
        cfg.alpha = parse_axis_at(r, Reader::sub(p, "alpha"), r.string(v, p, "alpha", to_string(cfg.alpha)));
        if (cfg.theta.axis == cfg.alpha.axis) r.fail(Reader::sub(p, "alpha"), "alpha must be orthogonal to theta");
        cfg.rule = parse_rule(r, Reader::sub(p, "rule"), r.string(v, p, "rule", rule_name(cfg.rule)));
        const std::string b = r.string(v, p, "backend", cfg.backend == Backend::fd ? "fd" : "spectral");
        if (b == "fd") cfg.backend = Backend::fd;
        else if (b == "spectral") cfg.backend = Backend::spectral;
        else r.fail(Reader::sub(p, "backend"), "backend must be \"fd\" or \"spectral\"");
    }
    {
        const Path p{"kernel"};
        const json& v = child(root, "kernel");
        r.known_keys(v, p, {"samples", "seed", "tolerance", "elimination_tolerance", "families"});
        cfg.kernel_samples = int(r.integer(v, p, "samples", cfg.kernel_samples));
        if (cfg.kernel_samples < kMinKernelSamples || cfg.kernel_samples > 1000000)
            r.fail(Reader::sub(p, "samples"), "must be in 100..1e6");
        cfg.kernel_seed = r.seed(v, p, "seed", cfg.kernel_seed);
        cfg.kernel_tolerance = r.number(v, p, "tolerance", cfg.kernel_tolerance);
        cfg.elimination_tolerance = r.number(v, p, "elimination_tolerance", cfg.elimination_tolerance);
        if (v.contains("families")) {
            const Path q = Reader::sub(p, "families");
            const json& f = v.at("families");
            if (!f.is_array()) r.fail(q, "expected a list of pp, sp, ps, ss");
            cfg.families = {false, false, false, false};
            for (const auto& e : f) {
                std::string n = e.is_string() ? e.get<std::string>() : "";
                if (n == "pp") cfg.families.include_pp = true;
                else if (n == "sp") cfg.families.include_sp = true;
                else if (n == "ps") cfg.families.include_ps = true;
                else if (n == "ss") cfg.families.include_ss = true;
                else r.fail(q, "unknown family " + e.dump());
            }
        }
    }
    {
        const Path p{"identities"};
        const json& v = child(root, "identities");
        r.known_keys(v, p, {"tolerance"});
        cfg.identity_tolerance = r.number(v, p, "tolerance", cfg.identity_tolerance);
    }
    {
        const Path p{"iso"};
        const json& v = child(root, "iso");
        r.known_keys(v, p, {"enabled", "rule", "g2", "use_sources", "input"});
        cfg.iso = r.boolean(v, p, "enabled", cfg.iso);
        cfg.iso_rule = parse_rule(r, Reader::sub(p, "rule"), r.string(v, p, "rule", rule_name(cfg.iso_rule)));
        const std::string g2 = r.string(v, p, "g2", cfg.g2 == G2Orientation::literal ? "literal" : "theta_cross_alpha");
        if (g2 == "theta_cross_alpha") cfg.g2 = G2Orientation::theta_cross_alpha;
        else if (g2 == "literal") cfg.g2 = G2Orientation::literal;
        else r.fail(Reader::sub(p, "g2"), "g2 must be \"theta_cross_alpha\" or \"literal\"");
        cfg.use_sources = r.boolean(v, p, "use_sources", cfg.use_sources);
        cfg.input = r.string(v, p, "input", cfg.input);
    }
    {
        const Path p{"roundtrip"};
        const json& v = child(root, "roundtrip");
        r.known_keys(v, p, {"n", "seed", "count", "tolerance"});
        long long n = r.integer(v, p, "n", cfg.roundtrip_n);
        if (n < 8 || n % 2 != 0 || n > 1024) r.fail(Reader::sub(p, "n"), "n must be even and in 8..1024");
        cfg.roundtrip_n = int(n);
        cfg.roundtrip_seed = r.seed(v, p, "seed", cfg.roundtrip_seed);
        cfg.roundtrip_count = int(r.integer(v, p, "count", cfg.roundtrip_count));
        if (cfg.roundtrip_count < 1 || cfg.roundtrip_count > 1000) r.fail(Reader::sub(p, "count"), "must be in 1..1000");
        if (v.contains("tolerance")) {
            const Path q = Reader::sub(p, "tolerance");
            const json& t = v.at("tolerance");
            r.known_keys(t, q, {"lambda", "mu", "rho"});
            cfg.tol_lambda = r.number(t, q, "lambda", cfg.tol_lambda);
            cfg.tol_mu = r.number(t, q, "mu", cfg.tol_mu);
            cfg.tol_rho = r.number(t, q, "rho", cfg.tol_rho);
        }
    }
    {
        const Path p{"stability"};
        const json& v = child(root, "stability");
        r.known_keys(v, p, {"samples", "n", "seed", "homogeneity_tolerance", "min_data_ratio"});
        cfg.stability_samples = int(r.integer(v, p, "samples", cfg.stability_samples));
        if (cfg.stability_samples < 10 || cfg.stability_samples > 10000)
            r.fail(Reader::sub(p, "samples"), "must be in 10..10000");
        long long n = r.integer(v, p, "n", cfg.stability_n);
        if (n < 8 || n % 2 != 0 || n > 1024) r.fail(Reader::sub(p, "n"), "n must be even and in 8..1024");
        cfg.stability_n = int(n);
        cfg.stability_seed = r.seed(v, p, "seed", cfg.stability_seed);
        cfg.homogeneity_tolerance = r.number(v, p, "homogeneity_tolerance", cfg.homogeneity_tolerance);
        cfg.min_data_ratio = r.number(v, p, "min_data_ratio", cfg.min_data_ratio);
    }
    if (root.contains("out")) {
        cfg.out = r.string(root, {}, "out", cfg.out);
        if (cfg.out.empty()) r.fail({"out"}, "must not be empty");
    }
    return cfg;
}

json bumps_json(const std::vector<BumpSpec>& bs) {
    json a = json::array();
    for (const auto& b : bs)
        a.push_back({{"center", {b.center[0], b.center[1], b.center[2]}}, {"radius", b.radius}, {"amplitude", b.amplitude}});
    return a;
}

const char* mode_name(PerturbationSpec::Mode m) {
    switch (m) {
        case PerturbationSpec::Mode::none: return "none";
        case PerturbationSpec::Mode::components: return "components";
        case PerturbationSpec::Mode::isotropic: return "isotropic";
        case PerturbationSpec::Mode::random: return "random";
        case PerturbationSpec::Mode::files: return "files";
    }
    return "none";
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        int line = 1 + int(std::count(text.begin(), text.begin() + std::ptrdiff_t(byte > 0 ? byte - 1 : 0), '\n'));
        std::string msg = e.what();
        if (auto at = msg.find("syntax error"); at != std::string::npos) msg = msg.substr(at);
        throw ConfigError(source, line, msg);
    }
    Reader r(text, source);
    return parse(r, root);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string effective_config(const RunConfig& c) {
    json pert = {{"mode", mode_name(c.perturbation.mode)},
                 {"seed", c.perturbation.seed},
                 {"bumps_per_component", c.perturbation.bumps_per_component},
                 {"random_isotropic", c.perturbation.random_isotropic},
                 {"path", c.perturbation.path}};
    json comps = json::object(), iso = json::object();
    for (const auto& [k, v] : c.perturbation.components) comps[k] = bumps_json(v);
    for (const auto& [k, v] : c.perturbation.isotropic) iso[k] = bumps_json(v);
    pert["components"] = comps;
    pert["isotropic"] = iso;
    json fam = json::array();
    if (c.families.include_pp) fam.push_back("pp");
    if (c.families.include_sp) fam.push_back("sp");
    if (c.families.include_ps) fam.push_back("ps");
    if (c.families.include_ss) fam.push_back("ss");
    json j = {
        {"grid", {{"N", c.grid.N}, {"L", c.grid.L}}},
        {"background", {{"lambda0", c.background.lambda0}, {"mu0", c.background.mu0}}},
        {"perturbation", pert},
        {"expansion",
         {{"channel", c.channel},
          {"theta", to_string(c.theta)},
          {"alpha", to_string(c.alpha)},
          {"rule", rule_name(c.rule)},
          {"backend", c.backend == Backend::fd ? "fd" : "spectral"}}},
        {"kernel",
         {{"samples", c.kernel_samples},
          {"seed", c.kernel_seed},
          {"tolerance", c.kernel_tolerance},
          {"elimination_tolerance", c.elimination_tolerance},
          {"families", fam}}},
        {"identities", {{"tolerance", c.identity_tolerance}}},
        {"iso",
         {{"enabled", c.iso},
          {"rule", rule_name(c.iso_rule)},
          {"g2", c.g2 == G2Orientation::literal ? "literal" : "theta_cross_alpha"},
          {"use_sources", c.use_sources},
          {"input", c.input}}},
        {"roundtrip",
         {{"n", c.roundtrip_n},
          {"seed", c.roundtrip_seed},
          {"count", c.roundtrip_count},
          {"tolerance", {{"lambda", c.tol_lambda}, {"mu", c.tol_mu}, {"rho", c.tol_rho}}}}},
        {"stability",
         {{"samples", c.stability_samples},
          {"n", c.stability_n},
          {"seed", c.stability_seed},
          {"homogeneity_tolerance", c.homogeneity_tolerance},
          {"min_data_ratio", c.min_data_ratio}}},
        {"out", c.out},
    };
    return j.dump(2);
}

void validate(const RunConfig& cfg) {
    validate(cfg.grid);
    validate(cfg.background);
    for (const auto& [k, v] : cfg.perturbation.components)
        for (const auto& b : v) validate(b);
    for (const auto& [k, v] : cfg.perturbation.isotropic)
        for (const auto& b : v) validate(b);
}

Perturbation generate_perturbation(const PerturbationSpec& spec, const Grid& g) {
    using M = PerturbationSpec::Mode;
    switch (spec.mode) {
        case M::none:
            return Perturbation(g);
        case M::components: {
            Perturbation P(g);
            for (const auto& [k, v] : spec.components) {
                if (k == "rho") {
                    P.rho = bump_field(g, v);
                    continue;
                }
                int A, B;
                if (!component_key(k, A, B)) throw Error("perturbation: bad component key " + k);
                P.C.voigt_component(A, B) = bump_field(g, v);
            }
            return P;
        }
        case M::isotropic: {
            auto get = [&](const char* k) {
                auto it = spec.isotropic.find(k);
                return it == spec.isotropic.end() ? ScalarField(g) : bump_field(g, it->second);
            };
            return make_isotropic(get("lambda"), get("mu"), get("rho"));
        }
        case M::random: {
            if (spec.random_isotropic) {
                IsoTriple t = random_triple(g, spec.seed);
                return make_isotropic(t.lambda, t.mu, t.rho);
            }
            std::mt19937_64 rng(spec.seed);
            RandomBumpRanges ranges;
            ranges.count = spec.bumps_per_component;
            Perturbation P(g);
            for (int s = 0; s < kVoigtSlots; ++s) P.C.slot(s) = bump_field(g, random_bumps(rng, ranges));
            P.rho = bump_field(g, random_bumps(rng, ranges));
            return P;
        }
        case M::files: {
            Perturbation P = read_tensor_bundle(spec.path);
            if (P.grid() != g)
                throw Error("perturbation: bundle " + spec.path + " has N = " + std::to_string(P.grid().N) +
                            ", config grid has N = " + std::to_string(g.N));
            return P;
        }
    }
    return Perturbation(g);
}

}  // namespace elastoborn
