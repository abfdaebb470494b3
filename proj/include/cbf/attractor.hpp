#pragma once
// Attractor-side constructions: orthogonal projections onto leading Stokes
// eigenfunctions, the maximal subset for the low-mode domination relation,
// the graph-approximation scale eps_n, and long-run attractor sampling.

#include <cmath>
#include <vector>

#include "cbf/diagnostics.hpp"
#include "cbf/integrators.hpp"
#include "cbf/initial_data.hpp"

namespace cbf {

namespace detail {

// coefficient of the real eigenfunction slot inside a field: the component
// of c(k_rep) along the polarization direction; cos keeps the real part,
// sin the imaginary part
inline void add_slot_component(SpectralField& out, const SpectralField& u, const Grid& g,
                               const EigenSlot& slot) {
    std::array<int, 3> a{0, 0, 0};
    const int N = g.points_per_axis();
    for (int i = 0; i < g.dim(); ++i) a[i] = slot.k[i] >= 0 ? slot.k[i] : slot.k[i] + N;
    const Index idx = g.flatten(a);
    const Index jdx = conjugate_index(g, idx);
    auto basis = polarization_basis(g, slot.k);
    const auto& p = basis[static_cast<std::size_t>(slot.pol)];
    Complex c{0.0, 0.0};
    for (int i = 0; i < g.dim(); ++i) c += u.at(i, idx) * p[i];
    const Complex kept = slot.phase == 0 ? Complex{c.real(), 0.0} : Complex{0.0, c.imag()};
    for (int i = 0; i < g.dim(); ++i) {
        out.at(i, idx) += kept * p[i];
        if (jdx != idx) out.at(i, jdx) += std::conj(kept) * p[i];
    }
}

}  // namespace detail

/// P_n keeps the n lowest-eigenvalue real eigenfunctions (ties broken by the
/// documented lexicographic lattice order); Q_n = I - P_n
inline std::pair<SpectralField, SpectralField> project_Pn_Qn(const SpectralField& u, std::size_t n,
                                                             const StokesSpectrum& spectrum) {
    if (n > spectrum.size()) throw InvalidArgument("project_Pn_Qn: n exceeds the retained modes");
    const Grid& g = u.grid();
    SpectralField pn(g);
    for (std::size_t i = 0; i < n; ++i) detail::add_slot_component(pn, u, g, spectrum.slots[i]);
    SpectralField qn = u - pn;
    return {std::move(pn), std::move(qn)};
}

inline std::pair<SpectralField, SpectralField> project_Pn_Qn(const SpectralField& u, std::size_t n) {
    return project_Pn_Qn(u, n, compute_stokes_spectrum(u.grid()));
}

/// greedy subset of the sample that keeps the relation
/// ||Q_n(x - y)|| <= ||P_n(x - y)|| pairwise; grown in sample order, maximal
/// with respect to insertion (not globally maximal)
inline std::vector<std::size_t> maximal_low_mode_set(const std::vector<SpectralField>& points,
                                                std::size_t n, const StokesSpectrum& spectrum) {
    if (points.empty()) throw InvalidArgument("maximal_low_mode_set: empty sample");
    std::vector<std::size_t> keep;
    std::vector<std::pair<SpectralField, SpectralField>> proj;
    proj.reserve(points.size());
    for (const auto& x : points) proj.push_back(project_Pn_Qn(x, n, spectrum));
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool ok = true;
        for (std::size_t kept : keep) {
            SpectralField dq = proj[i].second - proj[kept].second;
            SpectralField dp = proj[i].first - proj[kept].first;
            if (norm_H(dq) > norm_H(dp)) {
                ok = false;
                break;
            }
        }
        if (ok) keep.push_back(i);
    }
    return keep;
}

/// graph-approximation accuracy at mode cutoff n
struct DeviationScale {
    std::size_t n = 0;
    double lambda_next = 0.0;  // lambda_{n+1}
    double C0 = 0.0;
    double M0 = 0.0;
    double epsilon_n = 0.0;  // 2 M0 exp(-lambda_{n+1} / (2 C0))
};

/// C0 defaults to the fitted ratio from the report inflated by 10%; pass an
/// explicit C0 to override
inline DeviationScale deviation_scale(const LogLipschitzReport& report,
                                      const StokesSpectrum& spectrum, std::size_t n,
                                      double C0_override = 0.0) {
    if (n + 1 > spectrum.size())
        throw InvalidArgument("deviation_scale: lambda_{n+1} outside the computed spectrum");
    DeviationScale d;
    d.n = n;
    d.lambda_next = spectrum.lambda(n + 1);
    d.C0 = C0_override > 0.0 ? C0_override : 1.1 * report.grad_log_ratio;
    if (!(d.C0 > 0.0)) throw InvalidArgument("deviation_scale: fitted C0 must be positive");
    d.M0 = report.M0;
    d.epsilon_n = 2.0 * d.M0 * std::exp(-d.lambda_next / (2.0 * d.C0));
    return d;
}

/// the trend series log(n) / lambda_n, n = 2..size
inline std::vector<double> log_n_over_lambda_series(const StokesSpectrum& spectrum) {
    std::vector<double> out;
    for (std::size_t n = 2; n <= spectrum.size(); ++n)
        out.push_back(std::log(static_cast<double>(n)) / spectrum.lambda(n));
    return out;
}

/// snapshots taken after a burn-in horizon from several initial conditions
/// under steady forcing
struct AttractorSample {
    std::vector<SpectralField> points;
    double burn_in = 0.0;
    std::size_t n_initial = 0;
    bool stationary = true;     // H-norm drift below 1% over the last quarter
    double worst_drift = 0.0;   // max over initial conditions
    std::vector<std::uint64_t> seeds;
};

struct AttractorSampleOptions {
    std::size_t n_initial = 8;
    double burn_in = 0.0;  // 0 = default 10/alpha
    double sample_window = 1.0;
    std::size_t samples_per_ic = 4;
    double dt = 1e-3;
    double initial_norm = 1.0;
    std::uint64_t seed = 1;
};

/// run n_initial seeded trajectories to the statistically steady regime and
/// collect snapshots; burn-in adequacy is checked by H-norm stationarity
inline AttractorSample sample_attractor(const Grid& g, const PhysParams& params,
                                        const ForcingSpec& forcing,
                                        const AttractorSampleOptions& opt = {}) {
    if (forcing.kind() != ForcingSpec::Kind::steady)
        throw InvalidArgument("sample_attractor: steady forcing required");
    AttractorSample sample;
    sample.burn_in = opt.burn_in > 0.0 ? opt.burn_in : 10.0 / params.alpha;
    sample.n_initial = opt.n_initial;
    const double T = sample.burn_in + opt.sample_window;
    TimeGrid tg(0.0, T, opt.dt);
    const long first_keep = std::lround(sample.burn_in / opt.dt);
    const long stride =
        std::max<long>(1, (tg.n_steps - first_keep) / static_cast<long>(opt.samples_per_ic));
    for (std::size_t ic = 0; ic < opt.n_initial; ++ic) {
        const std::uint64_t seed = opt.seed + 7919 * ic;
        sample.seeds.push_back(seed);
        SpectralField x = random_solenoidal(g, seed, opt.initial_norm);
        SolveOptions sopt;
        sopt.snapshot_stride = stride;
        Trajectory traj = solve_cbf(x, tg, params, forcing, sopt);
        if (traj.blew_up()) throw BlowupError("sample_attractor: trajectory blew up", *traj.blowup_step);
        for (long step : traj.snapshot_steps())
            if (step >= first_keep) sample.points.push_back(traj.field_at_step(step));
        // stationarity of the H norm over the last quarter of the run
        const std::size_t q = traj.scalars.size() / 4;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t j = traj.scalars.size() - q; j < traj.scalars.size(); ++j) {
            const double h = std::sqrt(traj.scalars[j].H2);
            lo = std::min(lo, h);
            hi = std::max(hi, h);
        }
        const double drift = hi > 0.0 ? (hi - lo) / hi : 0.0;
        sample.worst_drift = std::max(sample.worst_drift, drift);
        if (drift > 0.01) sample.stationary = false;
    }
    return sample;
}

}  // namespace cbf
