#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cbf/field.hpp"
#include "cbf/operators.hpp"

namespace cbf {

/// External forcing. Fields handed to the solver are always projected,
/// dealiased and zero-mean. The time derivative f_t is carried separately
/// when known so a run can record which regularity class it claims.
class ForcingSpec {
  public:
    enum class Kind { zero, steady, time_varying };

    static ForcingSpec zero() { return ForcingSpec(); }

    static ForcingSpec steady(SpectralField f) {
        ForcingSpec s;
        s.kind_ = Kind::steady;
        detail::postprocess(f);
        s.steady_ = std::move(f);
        return s;
    }

    static ForcingSpec time_varying(std::function<SpectralField(double)> fn,
                                    std::function<SpectralField(double)> fn_dt = nullptr) {
        if (!fn) throw InvalidArgument("ForcingSpec: time_varying requires a field function");
        ForcingSpec s;
        s.kind_ = Kind::time_varying;
        s.fn_ = std::move(fn);
        s.fn_dt_ = std::move(fn_dt);
        return s;
    }

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    bool has_time_derivative() const { return kind_ != Kind::time_varying || static_cast<bool>(fn_dt_); }

    /// regularity class the run claims for its forcing
    std::string hypothesis_class() const {
        return has_time_derivative() ? "W^{1,2}(0,T;H)" : "L^2(0,T;H)";
    }

    /// rhs += f(t)
    void add_to(double t, SpectralField& rhs) const {
        switch (kind_) {
            case Kind::zero:
                return;
            case Kind::steady:
                rhs += *steady_;
                return;
            case Kind::time_varying: {
                SpectralField f = fn_(t);
                detail::postprocess(f);
                rhs += f;
                return;
            }
        }
    }

    /// (f(t), u)_H
    double inner_with(double t, const SpectralField& u) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::steady:
                return inner_product_H(*steady_, u);
            case Kind::time_varying: {
                SpectralField f = fn_(t);
                detail::postprocess(f);
                return inner_product_H(f, u);
            }
        }
        return 0.0;
    }

    /// squared V' norm of f(t) (Fourier norm with s = -1)
    double vprime_norm2(double t, const Grid& g) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::steady: {
                const double n = sobolev_norm(*steady_, -1.0);
                return n * n;
            }
            case Kind::time_varying: {
                SpectralField f = fn_(t);
                detail::postprocess(f);
                const double n = sobolev_norm(f, -1.0);
                return n * n;
            }
        }
        (void)g;
        return 0.0;
    }

    const SpectralField* steady_field() const { return steady_ ? &*steady_ : nullptr; }

  private:
    Kind kind_ = Kind::zero;
    std::optional<SpectralField> steady_;
    std::function<SpectralField(double)> fn_;
    std::function<SpectralField(double)> fn_dt_;
};

}  // namespace cbf
