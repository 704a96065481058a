#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "elastoborn/calculus.hpp"
#include "elastoborn/expansion.hpp"
#include "elastoborn/identity.hpp"
#include "elastoborn/tensor.hpp"

namespace elastoborn {

// Orientation of the S-channel delta'' source G2 = s (theta x alpha)(mu - c_s^2 rho).
//   theta_cross_alpha (s = +1): the orientation under which the third component
//       of d1^2 D_s carries the elliptic factor (d1^2 + lap/2)(lap/2).
//   literal (s = -1): alpha x theta as printed next to the G2 definition.
enum class G2Orientation { theta_cross_alpha, literal };

struct SourceTriple {
    Mode kind = Mode::P;
    std::array<ScalarField, 3> F;  // P channel
    std::array<VectorField, 3> G;  // S channel
};

struct DataFunctionalOptions {
    RayRule rule = RayRule::fourier;
    Backend backend = Backend::spectral;  // derivatives of the compact sources
    Nyquist nyquist = Nyquist::band_limited;
    G2Orientation g2 = G2Orientation::theta_cross_alpha;
};

// Nodes lost at each face by the materialized functionals.
inline constexpr int kDataMaskMargin = 6;

struct DataFunctional {
    Mode kind = Mode::P;
    Axis theta{0, 1};
    Axis alpha{1, 1};
    std::variant<ScalarField, VectorField> field;
    std::vector<unsigned char> mask;  // nodes whose fd stencils stay inside the box
    int mask_margin = 0;               // nodes lost at each face
    std::optional<SourceTriple> sources;
    DataFunctionalOptions options;

    const ScalarField& scalar() const { return std::get<ScalarField>(field); }
    const VectorField& vector() const { return std::get<VectorField>(field); }
};

// Nodes at least `margin` nodes from every face.
std::vector<unsigned char> interior_mask(const Grid& g, int margin);
// True if every node with |x| <= radius lies in the mask.
bool mask_covers(const Grid& g, const std::vector<unsigned char>& mask, double radius);

SourceTriple p_sources(const ScalarField& lambda, const ScalarField& mu, const ScalarField& rho, const Background& bg,
                       const Axis& theta, const DataFunctionalOptions& opt = {});
SourceTriple s_sources(const ScalarField& lambda, const ScalarField& mu, const ScalarField& rho, const Background& bg,
                       const Axis& theta, const Axis& alpha, const DataFunctionalOptions& opt = {});

DataFunctional data_functional_p(const ScalarField& lambda, const ScalarField& mu, const ScalarField& rho,
                                 const Background& bg, const Axis& theta = {0, 1},
                                 const DataFunctionalOptions& opt = {});
DataFunctional data_functional_s(const ScalarField& lambda, const ScalarField& mu, const ScalarField& rho,
                                 const Background& bg, const Axis& theta = {0, 1}, const Axis& alpha = {1, 1},
                                 const DataFunctionalOptions& opt = {});

// (theta.grad)^2 D from the stored sources: L^2 F0 + (lap/2) L F1 + (lap/2)^2 F2.
ScalarField ltheta2_p(const DataFunctional& D);
VectorField ltheta2_s(const DataFunctional& D);

struct ReconstructOptions {
    // Use the stored sources for d1^2 D (exact L^-1 clearing); otherwise 6th-order
    // fd on the materialized field.
    bool use_sources = true;
    // Line antiderivatives for stage 1: periodic (FFT) or upstream march.
    bool periodic_stage1 = true;
    // Smooth taper of the stage-1 result between 1 and this radius (<= 1 disables).
    double mu_taper_radius = 0.0;
    InvertOptions invert{0.0, 0.0, 1e-4, Nyquist::band_limited};
};

struct Reconstruction {
    ScalarField lambda, mu, rho;
    std::vector<std::string> warnings;
};

Reconstruction reconstruct(const DataFunctional& Dp, const DataFunctional& Ds, const Background& bg,
                           const ReconstructOptions& opt = {});

struct TripleErrors {
    double lambda = 0.0, mu = 0.0, rho = 0.0;
};
TripleErrors triple_errors(const Reconstruction& r, const ScalarField& lambda, const ScalarField& mu,
                           const ScalarField& rho);

// Random isotropic triple: two bumps per field, radius in [0.6, 0.9].
struct IsoTriple {
    ScalarField lambda, mu, rho;
};
IsoTriple random_triple(const Grid& g, std::uint64_t seed);

// Discrete H^s surrogate on the mask: sqrt(sum_{|b|<=s} (|b|!/b!) ||d^b f||^2) with fd derivatives.
double masked_sobolev_norm(const ScalarField& f, int s, const std::vector<unsigned char>& mask);
double masked_sobolev_norm(const VectorField& f, int s, const std::vector<unsigned char>& mask);

struct StabilitySample {
    std::uint64_t seed = 0;
    double input_norm = 0.0;  // sum of H^4 norms of the truth
    double data_norm = 0.0;   // H^4 surrogate of D_p plus D_s on the mask
    double ratio = 0.0;
    double scaled_ratio = 0.0;  // same with the truth scaled by 7
};

struct StabilityReport {
    std::vector<StabilitySample> samples;
    double max_ratio = 0.0, median_ratio = 0.0;
    double max_homogeneity_dev = 0.0;  // max |r(7x) - r(x)| / r(x)
    double min_data_to_input = 0.0;    // min data_norm / input_norm
};

StabilityReport stability_ratio(int sample_count, std::uint64_t seed, const Background& bg, const Grid& g,
                                const DataFunctionalOptions& opt = {});
StabilitySample stability_sample(const IsoTriple& t, const Background& bg, const DataFunctionalOptions& opt = {});

// Rows of d1^2 D_p and the three components of d1^2 D_s acting on (lambda, mu, rho),
// theta = e1, alpha = e2.
Eigen::MatrixXcd iso_symbol_matrix(const FrequencySample& s, const Background& bg,
                                   G2Orientation g2 = G2Orientation::theta_cross_alpha);

}  // namespace elastoborn
