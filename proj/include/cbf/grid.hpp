#pragma once
// Torus geometry and spectral-mode bookkeeping: lattice wavenumbers,
// two-thirds dealias mask and the Stokes eigenvalue enumeration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cbf/error.hpp"

namespace cbf {

using Index = std::int64_t;

namespace detail {
struct GridTables {
    std::vector<std::uint8_t> keep;          // dealias mask, 1 = retained
    std::vector<double> kappa2;              // |2 pi k / L|^2 per flattened mode
    std::array<std::vector<double>, 3> kax;  // per-axis physical wavenumber 2 pi k_i / L
};
}  // namespace detail

/// Periodic box (R/LZ)^d sampled with N collocation points per axis.
/// Modes are stored in FFT order: axis index a maps to the integer
/// wavenumber a for a < N/2 and a - N otherwise (row-major, last axis fastest).
class Grid {
  public:
    Grid(int d, double L, int N) : d_(d), L_(L), N_(N) {
        if (d != 2 && d != 3) throw InvalidArgument("Grid: d must be 2 or 3");
        if (!(L > 0.0)) throw InvalidArgument("Grid: L must be positive");
        if (N < 8 || N % 2 != 0) throw InvalidArgument("Grid: N must be even and >= 8");
        modes_ = 1;
        for (int i = 0; i < d; ++i) modes_ *= N;
        build_tables();
    }

    int dim() const { return d_; }
    double length() const { return L_; }
    int points_per_axis() const { return N_; }
    Index modes() const { return modes_; }
    double cell_volume() const { return std::pow(L_ / N_, d_); }
    double volume() const { return std::pow(L_, d_); }

    /// smallest Stokes eigenvalue 4 pi^2 / L^2
    double lambda1() const {
        const double k1 = 2.0 * pi() * 1.0 / L_;
        return k1 * k1;
    }

    int dealias_cut() const { return N_ / 3; }  // keep |k_i| <= floor(N/3)

    int wavenumber(int a) const { return a < N_ / 2 ? a : a - N_; }

    bool keep(Index idx) const { return tables_->keep[static_cast<std::size_t>(idx)] != 0; }
    double kappa2(Index idx) const { return tables_->kappa2[static_cast<std::size_t>(idx)]; }
    double kappa_axis(int axis, int a) const { return tables_->kax[axis][static_cast<std::size_t>(a)]; }

    Index flatten(const std::array<int, 3>& a) const {
        Index idx = a[0];
        for (int i = 1; i < d_; ++i) idx = idx * N_ + a[i];
        return idx;
    }

    /// axis indices of a flattened mode
    std::array<int, 3> unflatten(Index idx) const {
        std::array<int, 3> a{0, 0, 0};
        for (int i = d_ - 1; i >= 0; --i) {
            a[i] = static_cast<int>(idx % N_);
            idx /= N_;
        }
        return a;
    }

    std::array<int, 3> lattice_of(Index idx) const {
        auto a = unflatten(idx);
        std::array<int, 3> k{0, 0, 0};
        for (int i = 0; i < d_; ++i) k[i] = wavenumber(a[i]);
        return k;
    }

    bool same_as(const Grid& o) const { return d_ == o.d_ && N_ == o.N_ && L_ == o.L_; }

    static double pi() { return 3.14159265358979323846; }

  private:
    void build_tables() {
        auto t = std::make_shared<detail::GridTables>();
        for (int i = 0; i < d_; ++i) {
            t->kax[i].resize(N_);
            for (int a = 0; a < N_; ++a)
                t->kax[i][a] = 2.0 * pi() * wavenumber(a) / L_;
        }
        t->keep.resize(modes_);
        t->kappa2.resize(modes_);
        const int cut = dealias_cut();
        for (Index idx = 0; idx < modes_; ++idx) {
            auto a = unflatten(idx);
            double k2 = 0.0;
            bool keep = true;
            for (int i = 0; i < d_; ++i) {
                const int k = wavenumber(a[i]);
                if (std::abs(k) > cut) keep = false;
                const double kap = t->kax[i][a[i]];
                k2 += kap * kap;
            }
            t->keep[idx] = keep ? 1 : 0;
            t->kappa2[idx] = k2;
        }
        tables_ = std::move(t);
    }

    int d_;
    double L_;
    int N_;
    Index modes_ = 0;
    std::shared_ptr<const detail::GridTables> tables_;
};

/// One real eigenfunction of the Stokes operator: a +/-k lattice pair,
/// a solenoidal polarization direction and a cosine/sine phase.
struct EigenSlot {
    double lambda;
    std::array<int, 3> k;  // pair representative, first nonzero component > 0
    int pol;               // polarization index, 0..d-2
    int phase;             // 0 = cos, 1 = sin
};

/// Eigenvalues of the Stokes operator on the retained (dealiased) band,
/// sorted with multiplicity. Entry n (0-based) is the (n+1)-th eigenvalue.
struct StokesSpectrum {
    std::vector<EigenSlot> slots;

    std::size_t size() const { return slots.size(); }
    /// lambda_n, 1-based as in the analysis
    double lambda(std::size_t n) const {
        if (n < 1 || n > slots.size()) throw InvalidArgument("StokesSpectrum: index out of range");
        return slots[n - 1].lambda;
    }
};

/// orthonormal polarization directions perpendicular to kappa(k)
inline std::vector<std::array<double, 3>> polarization_basis(const Grid& g, const std::array<int, 3>& k) {
    std::array<double, 3> kap{0, 0, 0};
    double n2 = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
        kap[i] = 2.0 * Grid::pi() * k[i] / g.length();
        n2 += kap[i] * kap[i];
    }
    const double n = std::sqrt(n2);
    if (g.dim() == 2) {
        return {{-kap[1] / n, kap[0] / n, 0.0}};
    }
    // d = 3: helper axis with the smallest |kappa| component, lowest index on ties
    int h = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(kap[i]) < std::abs(kap[h])) h = i;
    std::array<double, 3> e{0, 0, 0};
    e[h] = 1.0;
    std::array<double, 3> p1{kap[1] * e[2] - kap[2] * e[1], kap[2] * e[0] - kap[0] * e[2],
                             kap[0] * e[1] - kap[1] * e[0]};
    double p1n = std::sqrt(p1[0] * p1[0] + p1[1] * p1[1] + p1[2] * p1[2]);
    for (auto& c : p1) c /= p1n;
    std::array<double, 3> p2{kap[1] * p1[2] - kap[2] * p1[1], kap[2] * p1[0] - kap[0] * p1[2],
                             kap[0] * p1[1] - kap[1] * p1[0]};
    double p2n = std::sqrt(p2[0] * p2[0] + p2[1] * p2[1] + p2[2] * p2[2]);
    for (auto& c : p2) c /= p2n;
    return {p1, p2};
}

inline bool lattice_pair_representative(const std::array<int, 3>& k, int d) {
    for (int i = 0; i < d; ++i) {
        if (k[i] > 0) return true;
        if (k[i] < 0) return false;
    }
    return false;  // zero mode is excluded
}

/// Enumerate real Stokes eigenfunctions on the retained band, sorted by
/// (eigenvalue, lexicographic lattice representative, polarization, phase).
inline StokesSpectrum compute_stokes_spectrum(const Grid& g) {
    StokesSpectrum s;
    for (Index idx = 0; idx < g.modes(); ++idx) {
        if (!g.keep(idx)) continue;
        auto k = g.lattice_of(idx);
        if (!lattice_pair_representative(k, g.dim())) continue;
        const double lam = g.kappa2(idx);
        for (int p = 0; p < g.dim() - 1; ++p)
            for (int phase = 0; phase < 2; ++phase)
                s.slots.push_back(EigenSlot{lam, k, p, phase});
    }
    std::sort(s.slots.begin(), s.slots.end(), [](const EigenSlot& a, const EigenSlot& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.k != b.k) return a.k < b.k;
        if (a.pol != b.pol) return a.pol < b.pol;
        return a.phase < b.phase;
    });
    return s;
}

}  // namespace cbf
