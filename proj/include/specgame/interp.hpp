#pragma once
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace specgame {

// Piecewise-linear interpolant over a strictly increasing knot grid. The game
// solvers treat Monte Carlo curve tables as functions of the defense level
// through this class; no smoothness beyond C^0 is assumed.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size() || x_.size() < 2)
            throw std::invalid_argument("PiecewiseLinear: need >= 2 matching knots");
        for (std::size_t k = 1; k < x_.size(); ++k)
            if (!(x_[k] > x_[k - 1]))
                throw std::invalid_argument("PiecewiseLinear: x must be strictly increasing");
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

    double operator()(double x) const {
        if (x < x_min() - 1e-12 || x > x_max() + 1e-12)
            throw std::out_of_range("PiecewiseLinear: query outside hull");
        x = std::clamp(x, x_min(), x_max());
        std::size_t hi = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        if (hi == x_.size()) --hi;
        if (hi == 0) ++hi;
        std::size_t lo = hi - 1;
        double t = (x - x_[lo]) / (x_[hi] - x_[lo]);
        return y_[lo] + t * (y_[hi] - y_[lo]);
    }

    // Symmetric difference quotient of the interpolant, one-sided at the hull
    // edges. The default step is half the mean knot spacing; on the uniform
    // grids the solvers use it spans exactly the two neighboring segments.
    double derivative(double x, double h = 0.0) const {
        if (h <= 0.0) {
            double span = (x_max() - x_min()) / static_cast<double>(x_.size() - 1);
            h = 0.5 * span;
        }
        double lo = std::max(x - h, x_min());
        double hi = std::min(x + h, x_max());
        if (!(hi > lo)) throw std::invalid_argument("PiecewiseLinear: degenerate hull");
        return ((*this)(hi) - (*this)(lo)) / (hi - lo);
    }

    // In-place moving average with window 3 (ends keep window 2); used as the
    // optional pre-smoothing of measured curves before differentiation.
    void smooth3() {
        if (y_.size() < 3) return;
        std::vector<double> out(y_.size());
        out.front() = 0.5 * (y_[0] + y_[1]);
        out.back() = 0.5 * (y_[y_.size() - 1] + y_[y_.size() - 2]);
        for (std::size_t k = 1; k + 1 < y_.size(); ++k)
            out[k] = (y_[k - 1] + y_[k] + y_[k + 1]) / 3.0;
        y_ = std::move(out);
    }

private:
    std::vector<double> x_, y_;
};

}  // namespace specgame
