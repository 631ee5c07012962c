#include "perfhom/coefficients.hpp"

#include "perfhom/errors.hpp"
#include "perfhom/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>

namespace perfhom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wave_phase(const std::array<int, 2>& p, const Vec2& y) {
    return kTwoPi * (p[0] * y.x() + p[1] * y.y());
}

bool finite(const Mat2& m) { return m.allFinite(); }

class Hasher {
public:
    void add(double v) {
        if (v == 0.0) v = 0.0;  // fold -0.0
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        add_bits(bits);
    }
    void add(int v) { add_bits(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
    std::uint64_t value() const { return h_; }

private:
    void add_bits(std::uint64_t bits) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (bits >> (8 * i)) & 0xffu;
            h_ *= 1099511628211ull;
        }
    }
    std::uint64_t h_ = 1469598103934665603ull;
};

void hash_source(Hasher& h, const SourceField& s) {
    h.add(static_cast<int>(s.terms.size()));
    for (const auto& t : s.terms) {
        h.add(t.coefficient);
        h.add(t.macro.axis);
        h.add(t.macro.wave);
        h.add(t.micro.axis);
        h.add(t.micro.wave);
    }
}

}  // namespace

MatrixField MatrixField::constant(const Mat2& c) {
    MatrixField a;
    a.c = c;
    return a;
}

MatrixField MatrixField::trig(const Mat2& c, const Mat2& d, std::array<int, 2> wave) {
    MatrixField a;
    a.kind = FieldKind::Trig;
    a.c = c;
    a.d = d;
    a.wave = wave;
    return a;
}

Mat2 MatrixField::operator()(const Vec2& y) const {
    if (kind == FieldKind::Constant) return c;
    return c + d * std::sin(wave_phase(wave, y));
}

bool MatrixField::is_symmetric() const {
    if (c(0, 1) != c(1, 0)) return false;
    return kind == FieldKind::Constant || d(0, 1) == d(1, 0);
}

Mat2 eval_matrix(const MatrixField& a, const Vec2& y) { return a(y); }

EllipticityBounds validate_ellipticity(const MatrixField& a, int grid) {
    if (grid < 64) throw Error(ErrorKind::InvalidConfig, "ellipticity grid must be at least 64");
    if (!finite(a.c) || !finite(a.d)) throw Error(ErrorKind::InvalidConfig, "non-finite matrix coefficients");
    EllipticityBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const Mat2 m = a(Vec2(double(i) / grid, double(j) / grid));
            const double s11 = m(0, 0);
            const double s22 = m(1, 1);
            const double s12 = 0.5 * (m(0, 1) + m(1, 0));
            const double mid = 0.5 * (s11 + s22);
            const double rad = std::hypot(0.5 * (s11 - s22), s12);
            b.m = std::min(b.m, mid - rad);
            b.M = std::max(b.M, mid + rad);
        }
    }
    if (!(b.m > 0.0))
        throw Error(ErrorKind::NotElliptic, "smallest eigenvalue of the symmetric part is " + std::to_string(b.m));
    return b;
}

ScalarVolumeField ScalarVolumeField::constant(double value) {
    ScalarVolumeField f;
    f.base = value;
    return f;
}

ScalarVolumeField ScalarVolumeField::trig(double base, double amplitude, std::array<int, 2> wave) {
    ScalarVolumeField f;
    f.kind = FieldKind::Trig;
    f.base = base;
    f.amplitude = amplitude;
    f.wave = wave;
    return f;
}

double ScalarVolumeField::operator()(const Vec2& y) const {
    if (kind == FieldKind::Constant) return base;
    return base + amplitude * std::sin(wave_phase(wave, y));
}

double validate_mu(const ScalarVolumeField& mu, int grid) {
    if (grid < 64) throw Error(ErrorKind::InvalidConfig, "mu grid must be at least 64");
    if (!std::isfinite(mu.base) || !std::isfinite(mu.amplitude))
        throw Error(ErrorKind::InvalidConfig, "non-finite mu coefficients");
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) lo = std::min(lo, mu(Vec2(double(i) / grid, double(j) / grid)));
    if (!(lo > 0.0)) throw Error(ErrorKind::NotPositive, "minimum of mu is " + std::to_string(lo));
    return lo;
}

double SurfaceResistivity::at_angle(double theta) const {
    double v = -discrete_mean_shift;
    for (std::size_t k = 0; k < fourier.size(); ++k) {
        const double kt = double(k + 1) * theta;
        v += fourier[k][0] * std::cos(kt) + fourier[k][1] * std::sin(kt);
    }
    return v;
}

double SurfaceResistivity::at(const Vec2& y) const {
    return at_angle(std::atan2(y.y() - center.y(), y.x() - center.x()));
}

bool SurfaceResistivity::is_zero() const {
    if (discrete_mean_shift != 0.0) return false;
    return std::all_of(fourier.begin(), fourier.end(), [](const auto& ab) { return ab[0] == 0.0 && ab[1] == 0.0; });
}

double SurfaceResistivity::sup_norm(int samples) const {
    double s = 0.0;
    for (int i = 0; i < samples; ++i) s = std::max(s, std::abs(at_angle(kTwoPi * i / samples)));
    return s;
}

void SurfaceResistivity::validate() const {
    if (fourier.size() > kMaxModes)
        throw Error(ErrorKind::InvalidConfig, "alpha supports at most 4 Fourier modes");
    for (const auto& ab : fourier)
        if (!std::isfinite(ab[0]) || !std::isfinite(ab[1]))
            throw Error(ErrorKind::InvalidConfig, "non-finite alpha coefficient");
    if (!std::isfinite(discrete_mean_shift)) throw Error(ErrorKind::InvalidConfig, "non-finite alpha shift");
}

double eval_alpha(const SurfaceResistivity& alpha, double theta) { return alpha.at_angle(theta); }

double discrete_sigma_integral(const SurfaceResistivity& alpha, const TriMesh& cell) {
    if (!cell.has_tag(EdgeTag::Sigma)) return 0.0;
    double sum = 0.0;
    for (const auto& e : cell.edges(EdgeTag::Sigma)) {
        const Vec2& p = cell.vertices[e[0]];
        const Vec2& q = cell.vertices[e[1]];
        const double len = (q - p).norm();
        for (double t : quad::kEdgePoints) sum += quad::kEdgeWeight * len * alpha.at(p + t * (q - p));
    }
    return sum;
}

SurfaceResistivity discrete_zero_mean_correction(const SurfaceResistivity& alpha, const TriMesh& cell) {
    if (!cell.has_tag(EdgeTag::Sigma)) throw Error(ErrorKind::EmptySigma, "cell mesh has no hole boundary");
    SurfaceResistivity out = alpha;
    out.center = cell.geometry.hole_center;
    out.discrete_mean_shift = 0.0;
    if (out.is_zero()) return out;
    double perimeter = 0.0;
    for (const auto& e : cell.edges(EdgeTag::Sigma)) perimeter += (cell.vertices[e[1]] - cell.vertices[e[0]]).norm();
    out.discrete_mean_shift = discrete_sigma_integral(out, cell) / perimeter;
    return out;
}

double SourceFactor::operator()(const Vec2& p) const {
    if (wave == 0) return 1.0;
    return std::sin(kTwoPi * wave * p[axis]);
}

SourceField SourceField::constant(double value) {
    SourceField f;
    if (value != 0.0) f.terms.push_back(SourceTerm{value, {}, {}});
    return f;
}

double SourceField::operator()(const Vec2& x, const Vec2& y) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coefficient * t.macro(x) * t.micro(y);
    return v;
}

bool SourceField::is_zero() const {
    return std::all_of(terms.begin(), terms.end(), [](const SourceTerm& t) { return t.coefficient == 0.0; });
}

void SourceField::validate() const {
    for (const auto& t : terms) {
        if (!std::isfinite(t.coefficient)) throw Error(ErrorKind::InvalidConfig, "non-finite source coefficient");
        for (const auto* f : {&t.macro, &t.micro})
            if (f->axis < 0 || f->axis > 1 || f->wave < 0)
                throw Error(ErrorKind::InvalidConfig, "source factor needs axis in {1,2} and wave >= 0");
    }
}

std::uint64_t fingerprint(const CoefficientSet& cs) {
    Hasher h;
    h.add(static_cast<int>(cs.A.kind));
    for (int i = 0; i < 4; ++i) h.add(cs.A.c(i));
    for (int i = 0; i < 4; ++i) h.add(cs.A.d(i));
    h.add(cs.A.wave[0]);
    h.add(cs.A.wave[1]);
    h.add(static_cast<int>(cs.mu.kind));
    h.add(cs.mu.base);
    h.add(cs.mu.amplitude);
    h.add(cs.mu.wave[0]);
    h.add(cs.mu.wave[1]);
    h.add(static_cast<int>(cs.alpha.fourier.size()));
    for (const auto& ab : cs.alpha.fourier) {
        h.add(ab[0]);
        h.add(ab[1]);
    }
    h.add(cs.alpha.discrete_mean_shift);
    h.add(cs.alpha.center.x());
    h.add(cs.alpha.center.y());
    hash_source(h, cs.f);
    hash_source(h, cs.g);
    return h.value();
}

}  // namespace perfhom
