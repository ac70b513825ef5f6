#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ncflow/errors.hpp"

namespace ncflow {

// Scalar field on the truncated cone [0, Lambda) x S.  The tangential slot is
// a cell index into the model's PolarGrid (graphs are Eulerian: they only ever
// sample the field at grid colatitudes, so no interpolation in theta is
// needed; symmetric-mode fields ignore the index).
using ConeField = std::function<double(double s, int j)>;

inline ConeField constant_field(double value) {
    return [value](double, int) { return value; };
}

// Field integrated along the generators and stored on a uniform s-grid, one
// column per grid cell.  Values and s-derivatives are kept at the nodes (the
// derivative comes for free from the ODE right-hand side), so evaluation is
// cubic Hermite: O(step^4) accurate and exact at the nodes.
class SampledField {
public:
    SampledField() = default;
    SampledField(double s_max, int n_steps, int n_columns)
        : s_max_(s_max), n_steps_(n_steps), n_cols_(n_columns),
          ds_(s_max / n_steps),
          value_((n_steps + 1) * n_columns, 0.0),
          slope_((n_steps + 1) * n_columns, 0.0) {}

    double& value_at(int k, int j) { return value_[k * n_cols_ + j]; }
    double& slope_at(int k, int j) { return slope_[k * n_cols_ + j]; }
    double value_at(int k, int j) const { return value_[k * n_cols_ + j]; }
    double slope_at(int k, int j) const { return slope_[k * n_cols_ + j]; }

    double operator()(double s, int j) const { return eval(s, j).first; }

    // value and s-derivative of the interpolant
    std::pair<double, double> eval(double s, int j) const {
        require(n_cols_ > 0, ErrorKind::parameter, "SampledField: empty");
        require(s >= 0.0 && s <= s_max_ * (1.0 + 1e-12), ErrorKind::domain,
                "SampledField: sample outside [0, Lambda]");
        if (s > s_max_) s = s_max_;
        int k = static_cast<int>(s / ds_);
        if (k >= n_steps_) k = n_steps_ - 1;
        double t = (s - k * ds_) / ds_;
        double v0 = value_at(k, j), v1 = value_at(k + 1, j);
        double m0 = slope_at(k, j) * ds_, m1 = slope_at(k + 1, j) * ds_;
        double t2 = t * t, t3 = t2 * t;
        double v = (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * m0 +
                   (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * m1;
        double d = ((6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * m0 +
                    (-6 * t2 + 6 * t) * v1 + (3 * t2 - 2 * t) * m1) /
                   ds_;
        return {v, d};
    }

    int columns() const { return n_cols_; }
    int steps() const { return n_steps_; }
    double step() const { return ds_; }
    double s_max() const { return s_max_; }

private:
    double s_max_ = 0.0;
    int n_steps_ = 0;
    int n_cols_ = 0;
    double ds_ = 0.0;
    std::vector<double> value_;
    std::vector<double> slope_;
};

} // namespace ncflow
