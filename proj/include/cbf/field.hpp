#pragma once
// Vector fields on the torus. SpectralField stores full-complex Fourier
// coefficients, component-major; the invariants (Hermitian symmetry, zero
// mean, optional solenoidality) are maintained by repair helpers rather
// than by construction.

#include <cmath>
#include <complex>
#include <vector>

#include "cbf/error.hpp"
#include "cbf/fft.hpp"
#include "cbf/grid.hpp"

namespace cbf {

using Complex = std::complex<double>;

class SpectralField {
  public:
    explicit SpectralField(const Grid& g) : grid_(g), a_(static_cast<std::size_t>(g.dim() * g.modes())) {}

    const Grid& grid() const { return grid_; }
    int components() const { return grid_.dim(); }

    Complex& at(int c, Index idx) { return a_[static_cast<std::size_t>(c * grid_.modes() + idx)]; }
    const Complex& at(int c, Index idx) const { return a_[static_cast<std::size_t>(c * grid_.modes() + idx)]; }

    Complex* data(int c) { return a_.data() + c * grid_.modes(); }
    const Complex* data(int c) const { return a_.data() + c * grid_.modes(); }

    std::vector<Complex>& raw() { return a_; }
    const std::vector<Complex>& raw() const { return a_; }

    void set_zero() { std::fill(a_.begin(), a_.end(), Complex{0.0, 0.0}); }

    SpectralField& operator+=(const SpectralField& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    SpectralField& operator*=(double s) {
        for (auto& c : a_) c *= s;
        return *this;
    }

  private:
    Grid grid_;
    std::vector<Complex> a_;
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }

inline void axpy(double alpha, const SpectralField& x, SpectralField& y) {
    const auto& xa = x.raw();
    auto& ya = y.raw();
    for (std::size_t i = 0; i < xa.size(); ++i) ya[i] += alpha * xa[i];
}

/// collocation samples, same layout as the coefficients
class PhysicalField {
  public:
    explicit PhysicalField(const Grid& g) : grid_(g), a_(static_cast<std::size_t>(g.dim() * g.modes())) {}

    const Grid& grid() const { return grid_; }
    int components() const { return grid_.dim(); }

    double& at(int c, Index idx) { return a_[static_cast<std::size_t>(c * grid_.modes() + idx)]; }
    double at(int c, Index idx) const { return a_[static_cast<std::size_t>(c * grid_.modes() + idx)]; }

    double* data(int c) { return a_.data() + c * grid_.modes(); }
    const double* data(int c) const { return a_.data() + c * grid_.modes(); }

    /// Euclidean magnitude of the velocity vector at a grid point
    double magnitude(Index idx) const {
        double s = 0.0;
        for (int c = 0; c < components(); ++c) {
            const double v = at(c, idx);
            s += v * v;
        }
        return std::sqrt(s);
    }

  private:
    Grid grid_;
    std::vector<double> a_;
};

/// index of the conjugate mode -k
inline Index conjugate_index(const Grid& g, Index idx) {
    auto a = g.unflatten(idx);
    std::array<int, 3> b{0, 0, 0};
    const int N = g.points_per_axis();
    for (int i = 0; i < g.dim(); ++i) b[i] = a[i] == 0 ? 0 : N - a[i];
    return g.flatten(b);
}

/// max |c(k) - conj(c(-k))| over modes and components
inline double hermitian_asymmetry(const SpectralField& f) {
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int c = 0; c < f.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) {
            const Index jdx = conjugate_index(g, idx);
            worst = std::max(worst, std::abs(f.at(c, idx) - std::conj(f.at(c, jdx))));
        }
    return worst;
}

inline double max_abs_coeff(const SpectralField& f) {
    double m = 0.0;
    for (const auto& c : f.raw()) m = std::max(m, std::abs(c));
    return m;
}

/// c(k) <- (c(k) + conj(c(-k)))/2, run after nonlinear evaluations
inline void hermitian_symmetrize(SpectralField& f) {
    const Grid& g = f.grid();
    for (int c = 0; c < f.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) {
            const Index jdx = conjugate_index(g, idx);
            if (jdx < idx) continue;
            const Complex avg = 0.5 * (f.at(c, idx) + std::conj(f.at(c, jdx)));
            f.at(c, idx) = avg;
            f.at(c, jdx) = std::conj(avg);
        }
}

inline void enforce_zero_mean(SpectralField& f) {
    for (int c = 0; c < f.components(); ++c) f.at(c, 0) = {0.0, 0.0};
}

inline bool finite(const SpectralField& f) {
    for (const auto& c : f.raw())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

/// inverse transform; rejects fields that are not Hermitian-symmetric
inline PhysicalField to_physical(const SpectralField& f) {
    const double scale = max_abs_coeff(f);
    if (hermitian_asymmetry(f) > 1e-8 * std::max(scale, 1e-300))
        throw InvalidArgument("to_physical: Hermitian symmetry violated");
    PhysicalField p(f.grid());
    auto& plan = fft_plan_for(f.grid());
    for (int c = 0; c < f.components(); ++c) plan.backward(f.data(c), p.data(c));
    return p;
}

inline SpectralField to_spectral(const PhysicalField& p) {
    SpectralField f(p.grid());
    auto& plan = fft_plan_for(p.grid());
    for (int c = 0; c < p.components(); ++c) plan.forward(p.data(c), f.data(c));
    return f;
}

/// H inner product (u, v) = integral of u . v, evaluated by Parseval
inline double inner_product_H(const SpectralField& u, const SpectralField& v) {
    if (!u.grid().same_as(v.grid())) throw InvalidArgument("inner_product_H: grid mismatch");
    const double vol = u.grid().volume();
    double s = 0.0;
    const auto& ua = u.raw();
    const auto& va = v.raw();
    for (std::size_t i = 0; i < ua.size(); ++i)
        s += ua[i].real() * va[i].real() + ua[i].imag() * va[i].imag();
    return vol * s;
}

inline double norm_H(const SpectralField& u) { return std::sqrt(inner_product_H(u, u)); }

}  // namespace cbf
