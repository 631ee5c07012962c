/// @file coefficients.hpp
/// @brief Closed catalog of periodic coefficient fields and their validators.

#pragma once

#include "perfhom/mesh.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace perfhom {

enum class FieldKind { Constant, Trig };

/// a_ij(y) = c_ij + d_ij sin(2 pi p.y)
struct MatrixField {
    FieldKind kind = FieldKind::Constant;
    Mat2 c = Mat2::Identity();
    Mat2 d = Mat2::Zero();
    std::array<int, 2> wave{0, 0};

    static MatrixField constant(const Mat2& c);
    static MatrixField trig(const Mat2& c, const Mat2& d, std::array<int, 2> wave);

    Mat2 operator()(const Vec2& y) const;
    bool is_symmetric() const;
};

Mat2 eval_matrix(const MatrixField& a, const Vec2& y);

struct EllipticityBounds {
    double m = 0.0;
    double M = 0.0;
};

/// Extreme eigenvalues of the symmetric part over a grid x grid sample of Y.
/// Throws NotElliptic when m <= 0 and InvalidConfig when grid < 64.
EllipticityBounds validate_ellipticity(const MatrixField& a, int grid = 64);

/// mu(y) = base + amplitude sin(2 pi p.y)
struct ScalarVolumeField {
    FieldKind kind = FieldKind::Constant;
    double base = 1.0;
    double amplitude = 0.0;
    std::array<int, 2> wave{0, 0};

    static ScalarVolumeField constant(double value);
    static ScalarVolumeField trig(double base, double amplitude, std::array<int, 2> wave);

    double operator()(const Vec2& y) const;
};

/// Minimum over a grid x grid sample; throws NotPositive when it is <= 0.
double validate_mu(const ScalarVolumeField& mu, int grid = 64);

/// alpha(theta) = sum_k a_k cos(k theta) + b_k sin(k theta) - discrete_mean_shift,
/// theta measured around `center`.
struct SurfaceResistivity {
    static constexpr int kMaxModes = 4;

    std::vector<std::array<double, 2>> fourier;  ///< (a_k, b_k) for k = 1..K
    double discrete_mean_shift = 0.0;
    Vec2 center{0.5, 0.5};

    double at_angle(double theta) const;
    double at(const Vec2& y) const;
    bool is_zero() const;
    /// sup |alpha| sampled on `samples` equally spaced angles.
    double sup_norm(int samples = 4096) const;
    /// Throws InvalidConfig for more than kMaxModes modes or non-finite values.
    void validate() const;
};

double eval_alpha(const SurfaceResistivity& alpha, double theta);

/// Edge-quadrature integral of alpha over the SIGMA edges of a cell mesh.
double discrete_sigma_integral(const SurfaceResistivity& alpha, const TriMesh& cell);

/// Returns alpha with discrete_mean_shift chosen so that its SIGMA integral on `cell`
/// vanishes. Throws EmptySigma when the mesh has no hole.
SurfaceResistivity discrete_zero_mean_correction(const SurfaceResistivity& alpha, const TriMesh& cell);

/// One factor of a separable term: 1 (wave == 0) or sin(2 pi wave p[axis]).
struct SourceFactor {
    int axis = 0;
    int wave = 0;

    double operator()(const Vec2& p) const;
};

struct SourceTerm {
    double coefficient = 1.0;
    SourceFactor macro;  ///< factor in x
    SourceFactor micro;  ///< factor in y
};

/// f(x,y) = sum_j coefficient_j u_j(x) v_j(y)
struct SourceField {
    std::vector<SourceTerm> terms;

    static SourceField constant(double value);

    double operator()(const Vec2& x, const Vec2& y) const;
    bool is_zero() const;
    void validate() const;
};

struct CoefficientSet {
    MatrixField A;
    ScalarVolumeField mu;
    SurfaceResistivity alpha;
    SourceField f = SourceField::constant(1.0);
    SourceField g;
};

/// Stable hash of every numeric field, used as model provenance.
std::uint64_t fingerprint(const CoefficientSet& coefficients);

}  // namespace perfhom
