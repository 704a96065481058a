#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elastoborn/calculus.hpp"
#include "elastoborn/tensor.hpp"

namespace elastoborn {

constexpr int kParams = 22;  // 21 Voigt slots, then rho
std::string param_name(int col);  // "c11", "c16", ..., "rho"

struct FrequencySample {
    std::array<double, 3> xi{};
};

constexpr double kDegeneracyGuard = 0.05;
bool guard_ok(const FrequencySample& s, double delta = kDegeneracyGuard);

// One zero-data identity, every entry a constant-coefficient operator acting
// on the corresponding parameter.
struct IdentityRow {
    std::string family;  // PP, SPa, SPb, PSa, PSb, SS
    std::string label;   // e.g. "SPb(e1,e2)", "PSa_3(e1)"
    Axis theta;
    Axis alpha;          // unused for PP/PS
    int component = -1;  // 0-based vector component for PS/SS
    std::array<SymbolPolynomial, kParams> ops;
};

struct IdentityOptions {
    bool include_pp = true, include_sp = true, include_ps = true, include_ss = true;
};

// Full inventory: the e1 / (e1,e2) templates under all six axis permutations,
// deduplicated. 51 rows with everything included.
std::vector<IdentityRow> identity_rows(const Background& bg, const IdentityOptions& opt = {});

struct SymbolMatrix {
    Eigen::MatrixXcd M;               // m x 22, raw
    Eigen::VectorXd scale;            // 1 / sup-norm of each raw row (1 for zero rows)
    std::vector<std::string> labels;
    Eigen::MatrixXcd normalized() const;
};

SymbolMatrix symbol_matrix(const FrequencySample& s, const Background& bg, const IdentityOptions& opt = {});
SymbolMatrix symbol_matrix(const FrequencySample& s, const std::vector<IdentityRow>& rows);

double sigma_min(const Eigen::MatrixXcd& A);

// Quasi-random points on the sphere: 2D Sobol with a seeded digital shift
// (std::mt19937_64), equal-area map, guard failures skipped.
std::vector<FrequencySample> sphere_samples(int count, std::uint64_t seed, double radius = 1.0);

struct KernelSample {
    FrequencySample xi;
    double sigma_min = 0.0;
};

struct KernelReport {
    std::vector<KernelSample> samples;
    double min_sigma = 0.0;
    double tolerance = 1e-6;
    int rows = 0;
    bool pass = false;
};

inline constexpr int kMinKernelSamples = 100;

// Throws for fewer than kMinKernelSamples samples or a guard-failing sample.
KernelReport kernel_certificate(const std::vector<FrequencySample>& samples, const Background& bg,
                                double tolerance = 1e-6, const IdentityOptions& opt = {});

struct EliminationStep {
    std::string name;
    Eigen::VectorXcd target;  // length 22
    double residual = 0.0;
    bool pass = false;
};

// Targets in the order of the uniqueness argument, ending with all 22 unit rows.
std::vector<EliminationStep> elimination_targets(const FrequencySample& s, const Background& bg);
// ||t - P t|| / ||t|| with P the orthogonal projector onto span of the rows of M.
double rowspace_residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& t, double rank_tol = 1e-10);
std::vector<EliminationStep> elimination_replay(const FrequencySample& s, const Background& bg,
                                                const IdentityOptions& opt = {}, double tol = 1e-8);

// LHS - RHS of every row evaluated on P in physical space.
std::map<std::string, ScalarField> evaluate_zero_data_identities(const Perturbation& P, const Background& bg,
                                                                 Backend backend = Backend::fd,
                                                                 const IdentityOptions& opt = {});
// Convenience fields used in tests: 2 c1212 - c_s^2 rho and c1112 - c2221.
std::map<std::string, ScalarField> elimination_fields(const Perturbation& P, const Background& bg);

}  // namespace elastoborn
