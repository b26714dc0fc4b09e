// grid.hpp — Uniform sampling grids for trajectories.

#pragma once

#include <vector>

#include "bandspin/errors.hpp"

namespace bandspin {

// Uniform time grid with `samples` points covering [t_start, t_end] inclusive.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int samples = 2;

    void validate() const {
        if (t_start < 0.0) throw ConfigError("time grid must start at t >= 0");
        if (!(t_end > t_start)) throw ConfigError("time grid must have t_end > t_start");
        if (samples < 2) throw ConfigError("time grid needs at least 2 samples");
    }

    double spacing() const { return (t_end - t_start) / (samples - 1); }

    std::vector<double> times() const {
        validate();
        std::vector<double> ts(static_cast<std::size_t>(samples));
        const double dt = spacing();
        for (int i = 0; i < samples; ++i) ts[static_cast<std::size_t>(i)] = t_start + dt * i;
        ts.back() = t_end;
        return ts;
    }
};

} // namespace bandspin
