#pragma once

#include <cmath>
#include <vector>

#include "ncflow/errors.hpp"

namespace ncflow {

// Cell-centered colatitude grid on [0, pi].  Cells sit at (j + 1/2) h with
// h = pi / n_cells, so no sample lands on a pole; the cell faces at j h
// include the poles, where the area factor sin(theta) vanishes and flux-form
// operators close without ghost data.  Axisymmetric scalars extend evenly
// across both poles, which the reflected index encodes.
//
// n_cells == 1 is the fully symmetric mode: the single cell carries the
// s-only data and every tangential difference vanishes identically.
struct PolarGrid {
    int n_cells = 1;
    double h = 0.0;
    std::vector<double> theta;      // cell centers
    std::vector<double> sin_center; // sin at centers
    std::vector<double> sin_face;   // sin at faces, size n_cells + 1

    static PolarGrid make(int n_cells) {
        require(n_cells >= 1, ErrorKind::parameter,
                "PolarGrid: n_cells must be >= 1");
        PolarGrid g;
        g.n_cells = n_cells;
        g.h = M_PI / n_cells;
        g.theta.resize(n_cells);
        g.sin_center.resize(n_cells);
        g.sin_face.resize(n_cells + 1);
        for (int j = 0; j < n_cells; ++j) {
            g.theta[j] = (j + 0.5) * g.h;
            g.sin_center[j] = std::sin(g.theta[j]);
        }
        for (int j = 0; j <= n_cells; ++j) g.sin_face[j] = std::sin(j * g.h);
        g.sin_face[0] = 0.0;
        g.sin_face[n_cells] = 0.0;
        return g;
    }

    // Even reflection across the poles for cell-centered data.
    int reflect(int j) const {
        if (j < 0) return -j - 1;
        if (j >= n_cells) return 2 * n_cells - j - 1;
        return j;
    }

    bool symmetric() const { return n_cells == 1; }
};

} // namespace ncflow
