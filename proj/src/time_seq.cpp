#include "fracvi/time_seq.hpp"

#include <cmath>
#include <string>

namespace fracvi {

Grid::Grid(double a, double b, int N) : a_(a), b_(b), N_(N), h_(0.0) {
    if (!(a < b)) {
        throw DomainError("grid: require a < b");
    }
    if (N < 1) {
        throw DomainError("grid: require N >= 1");
    }
    h_ = (b - a) / N;
}

double Grid::t(int k) const {
    if (k < 0 || k > N_) {
        throw UsageError("grid: node index " + std::to_string(k) + " outside [0, " +
                         std::to_string(N_) + "]");
    }
    if (k == N_) {
        return b_;
    }
    return a_ + k * h_;
}

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("fractional order must satisfy 0 < alpha <= 1, got " +
                          std::to_string(alpha));
    }
}

TimeSeq::TimeSeq(int N, int dim) : TimeSeq(N, dim, IndexRange{0, N}) {}

TimeSeq::TimeSeq(int N, int dim, IndexRange valid) {
    if (N < 0 || dim < 1) {
        throw UsageError("time sequence: require N >= 0 and dim >= 1");
    }
    data_ = Eigen::MatrixXd::Zero(dim, N + 1);
    set_valid_range(valid);
}

TimeSeq TimeSeq::constant(int N, const Eigen::VectorXd& value) {
    TimeSeq seq(N, static_cast<int>(value.size()));
    seq.data_.colwise() = value;
    return seq;
}

TimeSeq TimeSeq::from_scalars(const std::vector<double>& values) {
    if (values.empty()) {
        throw UsageError("time sequence: need at least one value");
    }
    TimeSeq seq(static_cast<int>(values.size()) - 1, 1);
    for (std::size_t k = 0; k < values.size(); ++k) {
        seq.data_(0, static_cast<Eigen::Index>(k)) = values[k];
    }
    return seq;
}

void TimeSeq::set_valid_range(IndexRange r) {
    // An empty range (first > last) is allowed: a fully shifted-out sequence.
    if (r.first < 0 || r.last > N() || r.first > r.last + 1) {
        throw UsageError("time sequence: valid range [" + std::to_string(r.first) + ", " +
                         std::to_string(r.last) + "] not inside [0, " + std::to_string(N()) +
                         "]");
    }
    valid_ = r;
}

void TimeSeq::check(int k) const {
    if (!valid_.contains(k)) {
        throw UsageError("time sequence: index " + std::to_string(k) + " outside valid range [" +
                         std::to_string(valid_.first) + ", " + std::to_string(valid_.last) + "]");
    }
}

TimeSeq::ConstColRef TimeSeq::at(int k) const {
    check(k);
    return data_.col(k);
}

TimeSeq::ColRef TimeSeq::at(int k) {
    check(k);
    return data_.col(k);
}

double TimeSeq::scalar(int k) const {
    if (dim() != 1) {
        throw UsageError("time sequence: scalar access on a sequence of dimension " +
                         std::to_string(dim()));
    }
    return at(k)(0);
}

double TimeSeq::max_abs() const {
    double m = 0.0;
    for (int k = valid_.first; k <= valid_.last; ++k) {
        m = std::max(m, data_.col(k).lpNorm<Eigen::Infinity>());
    }
    return m;
}

void require_valid(const TimeSeq& seq, IndexRange needed, const char* what) {
    if (!seq.valid_range().covers(needed)) {
        throw UsageError(std::string(what) + ": sequence must be valid on [" +
                         std::to_string(needed.first) + ", " + std::to_string(needed.last) +
                         "]");
    }
}

void require_shape(const TimeSeq& seq, int N, int dim, const char* what) {
    if (seq.N() != N || seq.dim() != dim) {
        throw UsageError(std::string(what) + ": expected " + std::to_string(N + 1) +
                         " slots of dimension " + std::to_string(dim) + ", got " +
                         std::to_string(seq.N() + 1) + " of dimension " +
                         std::to_string(seq.dim()));
    }
}

}  // namespace fracvi
