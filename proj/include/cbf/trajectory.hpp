#pragma once

#include <optional>
#include <vector>

#include "cbf/field.hpp"
#include "cbf/time_grid.hpp"

namespace cbf {

/// per-node scalar diagnostics recorded at every step
struct StepScalars {
    double t = 0.0;
    double H2 = 0.0;       // ||u||_H^2
    double V2 = 0.0;       // ||u||_V^2
    double Lr1 = 0.0;      // ||u||_{L^{r+1}}^{r+1}
    double finner = 0.0;   // (f(t), u)_H
    double max_mag = 0.0;  // max_x |u(x)|
};

/// Discrete solution record: scalar series at every node, field snapshots at
/// the configured stride (first and last nodes always kept). A blow-up leaves
/// the partial trajectory in place with blowup_step set.
class Trajectory {
  public:
    Trajectory(const Grid& g, const TimeGrid& tg, long stride)
        : grid_(g), tg_(tg), stride_(stride < 1 ? 1 : stride) {}

    const Grid& grid() const { return grid_; }
    const TimeGrid& time_grid() const { return tg_; }
    long stride() const { return stride_; }

    std::vector<StepScalars> scalars;
    std::optional<long> blowup_step;
    bool guard_failed = false;
    double max_repair = 0.0;

    void add_snapshot(long step, const SpectralField& u) {
        snap_steps_.push_back(step);
        snaps_.push_back(u);
    }

    bool has_step(long step) const {
        for (long s : snap_steps_)
            if (s == step) return true;
        return false;
    }

    const SpectralField& field_at_step(long step) const {
        for (std::size_t i = 0; i < snap_steps_.size(); ++i)
            if (snap_steps_[i] == step) return snaps_[i];
        throw InvalidArgument("Trajectory: no snapshot stored at requested step");
    }

    const std::vector<long>& snapshot_steps() const { return snap_steps_; }
    const std::vector<SpectralField>& snapshots() const { return snaps_; }

    const SpectralField& initial() const { return snaps_.front(); }
    const SpectralField& final_field() const { return snaps_.back(); }
    long last_step() const { return snap_steps_.empty() ? -1 : snap_steps_.back(); }

    bool blew_up() const { return blowup_step.has_value(); }

    /// snapshots at every node, as the linearized/adjoint solvers require
    bool dense() const { return stride_ == 1 && !blew_up(); }

  private:
    Grid grid_;
    TimeGrid tg_;
    long stride_;
    std::vector<long> snap_steps_;
    std::vector<SpectralField> snaps_;
};

}  // namespace cbf
