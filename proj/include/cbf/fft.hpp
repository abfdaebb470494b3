#pragma once
// Thin FFTW wrapper. Full complex-to-complex transforms (coefficients are
// stored full-spectrum), FFTW_ESTIMATE plans so results do not depend on
// planner timing from run to run.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "cbf/grid.hpp"

namespace cbf {

class FftPlan {
  public:
    explicit FftPlan(const Grid& g) : d_(g.dim()), n_(g.points_per_axis()), m_(g.modes()) {
        in_ = fftw_alloc_complex(static_cast<std::size_t>(m_));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(m_));
        int dims[3] = {n_, n_, n_};
        fwd_ = fftw_plan_dft(d_, dims, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(d_, dims, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    /// coefficients -> collocation samples (real parts of the inverse DFT)
    void backward(const std::complex<double>* spec, double* phys) {
        auto* in = reinterpret_cast<std::complex<double>*>(in_);
        for (Index i = 0; i < m_; ++i) in[i] = spec[i];
        fftw_execute(bwd_);
        auto* out = reinterpret_cast<std::complex<double>*>(out_);
        for (Index i = 0; i < m_; ++i) phys[i] = out[i].real();
    }

    /// collocation samples -> coefficients, normalized by 1/N^d
    void forward(const double* phys, std::complex<double>* spec) {
        auto* in = reinterpret_cast<std::complex<double>*>(in_);
        for (Index i = 0; i < m_; ++i) in[i] = {phys[i], 0.0};
        fftw_execute(fwd_);
        auto* out = reinterpret_cast<std::complex<double>*>(out_);
        const double scale = 1.0 / static_cast<double>(m_);
        for (Index i = 0; i < m_; ++i) spec[i] = out[i] * scale;
    }

  private:
    int d_, n_;
    Index m_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

inline FftPlan& fft_plan_for(const Grid& g) {
    static std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.dim(), g.points_per_axis());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftPlan>(g)).first;
    return *it->second;
}

}  // namespace cbf
