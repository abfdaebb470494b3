#pragma once
// Binary checkpoint format: magic "CBF1", then d, L (f64), N, component
// count, r, mu, alpha, beta, sigma, time t, followed by little-endian
// row-major coefficients with the components interleaved per mode
// (re, im for component 0, re, im for component 1, ...).

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "cbf/field.hpp"
#include "cbf/params.hpp"

namespace cbf {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts are unsupported");

struct Checkpoint {
    SpectralField field;
    PhysParams params;
    double time = 0.0;
};

namespace detail {

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("checkpoint: truncated file");
    return v;
}

}  // namespace detail

inline void write_checkpoint(const std::string& path, const SpectralField& f,
                             const PhysParams& p, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("checkpoint: cannot open " + path + " for writing");
    const Grid& g = f.grid();
    out.write("CBF1", 4);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
    detail::put<double>(out, g.length());
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points_per_axis()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(f.components()));
    detail::put<double>(out, p.r);
    detail::put<double>(out, p.mu);
    detail::put<double>(out, p.alpha);
    detail::put<double>(out, p.beta);
    detail::put<double>(out, p.sigma);
    detail::put<double>(out, t);
    for (Index idx = 0; idx < g.modes(); ++idx)
        for (int c = 0; c < f.components(); ++c) {
            detail::put<double>(out, f.at(c, idx).real());
            detail::put<double>(out, f.at(c, idx).imag());
        }
    if (!out) throw Error("checkpoint: write failed for " + path);
}

inline Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CBF1", 4) != 0)
        throw Error("checkpoint: bad magic in " + path);
    const auto d = detail::get<std::uint32_t>(in);
    const double L = detail::get<double>(in);
    const auto N = detail::get<std::uint32_t>(in);
    const auto ncomp = detail::get<std::uint32_t>(in);
    PhysParams p;
    p.r = detail::get<double>(in);
    p.mu = detail::get<double>(in);
    p.alpha = detail::get<double>(in);
    p.beta = detail::get<double>(in);
    p.sigma = detail::get<double>(in);
    const double t = detail::get<double>(in);
    Grid g(static_cast<int>(d), L, static_cast<int>(N));
    if (ncomp != static_cast<std::uint32_t>(g.dim()))
        throw Error("checkpoint: component count does not match the dimension");
    Checkpoint ck{SpectralField(g), p, t};
    for (Index idx = 0; idx < g.modes(); ++idx)
        for (std::uint32_t c = 0; c < ncomp; ++c) {
            const double re = detail::get<double>(in);
            const double im = detail::get<double>(in);
            ck.field.at(static_cast<int>(c), idx) = {re, im};
        }
    return ck;
}

}  // namespace cbf
