#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "elastoborn/bump.hpp"
#include "elastoborn/error.hpp"
#include "elastoborn/expansion.hpp"
#include "elastoborn/iso.hpp"
#include "elastoborn/tensor.hpp"

namespace elastoborn {

// Thrown for config problems; what() is "<source>:<line>: <message>".
class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& msg);
    int line() const { return line_; }

private:
    int line_;
};

struct PerturbationSpec {
    enum class Mode { none, components, isotropic, random, files } mode = Mode::none;
    // components: keys c11..c66 (either index order) and rho
    std::map<std::string, std::vector<BumpSpec>> components;
    // isotropic: keys lambda, mu, rho
    std::map<std::string, std::vector<BumpSpec>> isotropic;
    // random: one draw per storage slot and rho, or a lambda/mu/rho triple
    std::uint64_t seed = 1;
    int bumps_per_component = 1;
    bool random_isotropic = false;
    std::string path;  // files: tensor bundle directory
};

struct RunConfig {
    Grid grid{64, 2.0};
    Background background{2.0, 1.0};
    PerturbationSpec perturbation;

    std::string channel = "pp";
    Axis theta{0, 1};
    Axis alpha{1, 1};
    RayRule rule = RayRule::upwind;
    Backend backend = Backend::fd;

    // kernel-test
    int kernel_samples = 200;
    std::uint64_t kernel_seed = 1;
    double kernel_tolerance = 1e-6;
    double elimination_tolerance = 1e-8;
    IdentityOptions families;

    // verify-identities and forward
    double identity_tolerance = 1e-6;

    // forward --iso, reconstruct, roundtrip
    bool iso = false;
    RayRule iso_rule = RayRule::fourier;
    G2Orientation g2 = G2Orientation::theta_cross_alpha;
    bool use_sources = true;
    std::string input;  // reconstruct: directory written by forward --iso
    int roundtrip_n = 64;
    std::uint64_t roundtrip_seed = 1;
    int roundtrip_count = 1;
    double tol_lambda = 0.05, tol_mu = 0.01, tol_rho = 0.05;

    // stability
    int stability_samples = 20;
    int stability_n = 48;
    std::uint64_t stability_seed = 1;
    double homogeneity_tolerance = 1e-10;
    double min_data_ratio = 1e-3;

    std::string out = "out";
};

RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
// Every field, defaults included, as pretty JSON; parses back to the same config.
std::string effective_config(const RunConfig& cfg);

void validate(const RunConfig& cfg);

// Deterministic in (spec, grid). Random mode draws with std::mt19937_64 seeded by spec.seed.
Perturbation generate_perturbation(const PerturbationSpec& spec, const Grid& g);
// Name of the generator recorded in run metadata.
inline constexpr const char* kPrngName = "mt19937_64";

}  // namespace elastoborn
