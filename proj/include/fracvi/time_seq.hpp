#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fracvi/errors.hpp"

namespace fracvi {

/// Uniform partition t_k = a + k h, k = 0..N, of [a, b].
class Grid {
public:
    Grid(double a, double b, int N);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    int N() const noexcept { return N_; }
    double h() const noexcept { return h_; }

    /// Node time; t(N) returns b exactly.
    double t(int k) const;

private:
    double a_;
    double b_;
    int N_;
    double h_;
};

/// Fractional order, 0 < alpha <= 1.
class FracOrder {
public:
    explicit FracOrder(double alpha);

    double value() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// Inclusive index interval [first, last].
struct IndexRange {
    int first = 0;
    int last = 0;

    bool contains(int k) const noexcept { return k >= first && k <= last; }
    bool covers(IndexRange other) const noexcept {
        return other.first >= first && other.last <= last;
    }
    bool operator==(const IndexRange&) const = default;
};

/// N+1 slots of dim-dimensional vectors with an explicit range of readable indices.
///
/// Operators that lose an endpoint (left derivatives lose k = 0, right ones lose k = N,
/// shifts lose one end) keep all N+1 slots and narrow the valid range instead, so the
/// index k of a value always refers to the node t_k.
class TimeSeq {
public:
    using ColRef = Eigen::MatrixXd::ColXpr;
    using ConstColRef = Eigen::MatrixXd::ConstColXpr;

    TimeSeq() = default;
    /// All slots zero, valid on [0, N].
    TimeSeq(int N, int dim);
    TimeSeq(int N, int dim, IndexRange valid);

    /// Every slot equal to `value`, valid on [0, N].
    static TimeSeq constant(int N, const Eigen::VectorXd& value);
    /// Scalar sequence from N+1 values.
    static TimeSeq from_scalars(const std::vector<double>& values);

    int N() const noexcept { return static_cast<int>(data_.cols()) - 1; }
    int dim() const noexcept { return static_cast<int>(data_.rows()); }
    IndexRange valid_range() const noexcept { return valid_; }
    void set_valid_range(IndexRange r);

    /// Checked access; throws UsageError outside the valid range.
    ConstColRef at(int k) const;
    ColRef at(int k);
    double scalar(int k) const;

    /// Raw storage (dim x (N+1)), including slots outside the valid range.
    const Eigen::MatrixXd& data() const noexcept { return data_; }
    Eigen::MatrixXd& data() noexcept { return data_; }

    /// Max over valid k of ||value_k||_inf.
    double max_abs() const;

private:
    void check(int k) const;

    Eigen::MatrixXd data_;
    IndexRange valid_{};
};

/// Throws UsageError unless `seq` is readable on all of `needed`.
void require_valid(const TimeSeq& seq, IndexRange needed, const char* what);

/// Throws UsageError unless `seq` has N+1 slots and dimension `dim`.
void require_shape(const TimeSeq& seq, int N, int dim, const char* what);

}  // namespace fracvi
