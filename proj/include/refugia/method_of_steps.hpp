#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace refugia {

/// Uniform-grid solution history with node values and derivatives.
/// Queries before t = 0 return the constant initial segment; queries inside
/// a completed interval use cubic Hermite interpolation.
class HistoryBuffer {
public:
    /// capacity = 0 keeps every node, otherwise only the most recent `capacity`.
    HistoryBuffer(std::size_t dim, double step, std::vector<double> initial, std::size_t capacity = 0)
        : dim_(dim), step_(step), initial_(std::move(initial)), capacity_(capacity)
    {
        if (initial_.size() != dim_)
            throw std::invalid_argument("HistoryBuffer: initial segment has wrong dimension");
        if (capacity_ != 0 && capacity_ < 2)
            throw std::invalid_argument("HistoryBuffer: capacity must be >= 2");
        if (capacity_ != 0) {
            values_.resize(capacity_ * dim_);
            derivs_.resize(capacity_ * dim_);
        }
    }

    std::size_t dim() const { return dim_; }
    double step() const { return step_; }
    std::size_t node_count() const { return count_; }
    std::size_t front_node() const { return count_ - 1; }
    std::size_t oldest_node() const { return capacity_ == 0 || count_ <= capacity_ ? 0 : count_ - capacity_; }
    double node_time(std::size_t node) const { return static_cast<double>(node) * step_; }
    double front_time() const { return node_time(front_node()); }
    std::span<const double> initial() const { return initial_; }

    void append(std::span<const double> value)
    {
        if (capacity_ == 0) {
            values_.insert(values_.end(), value.begin(), value.end());
            derivs_.resize(values_.size(), 0.0);
        } else {
            const std::size_t off = offset(count_);
            std::copy(value.begin(), value.end(), values_.begin() + off);
            std::fill(derivs_.begin() + off, derivs_.begin() + off + dim_, 0.0);
        }
        ++count_;
    }

    std::span<double> value(std::size_t node) { return {values_.data() + offset(node), dim_}; }
    std::span<const double> value(std::size_t node) const { return {values_.data() + offset(node), dim_}; }
    std::span<double> derivative(std::size_t node) { return {derivs_.data() + offset(node), dim_}; }
    std::span<const double> derivative(std::size_t node) const { return {derivs_.data() + offset(node), dim_}; }

    /// Component c at time t <= front_time(). The front node's derivative must be set
    /// before querying inside the last interval.
    double interpolate(std::size_t c, double t) const
    {
        if (t <= 0.0)
            return initial_[c];
        const double u = t / step_;
        auto j = static_cast<std::size_t>(u);
        const std::size_t front = front_node();
        if (j >= front) {
            if (j == front && u - static_cast<double>(j) <= 1e-9)
                return value(front)[c];
            throw std::logic_error("HistoryBuffer: lookup beyond the computed front");
        }
        if (j < oldest_node())
            throw std::logic_error("HistoryBuffer: lookup before the retained window");
        const double s = u - static_cast<double>(j);
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        return h00 * value(j)[c] + h10 * step_ * derivative(j)[c] + h01 * value(j + 1)[c] +
               h11 * step_ * derivative(j + 1)[c];
    }

private:
    std::size_t offset(std::size_t node) const { return (capacity_ == 0 ? node : node % capacity_) * dim_; }

    std::size_t dim_;
    double step_;
    std::vector<double> initial_;
    std::size_t capacity_;
    std::size_t count_ = 0;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

/// Delayed lookups seen by the vector field at one stage.
class LagView {
public:
    LagView(const HistoryBuffer& history, double t, std::span<const double> stage)
        : history_(history), t_(t), stage_(stage)
    {
    }

    /// Component c at t - delay; a zero delay reads the current stage.
    double operator()(std::size_t c, double delay) const
    {
        return delay == 0.0 ? stage_[c] : history_.interpolate(c, t_ - delay);
    }

    double time() const { return t_; }

private:
    const HistoryBuffer& history_;
    double t_;
    std::span<const double> stage_;
};

/// Classic four-stage Runge-Kutta stepping for delay systems.
///
/// Field: void(double t, std::span<const double> y, const LagView&, std::span<double> dydt).
/// Every positive delay must be at least four steps so that stage lookups
/// land in completed intervals.
template <class Field>
class MethodOfSteps {
public:
    MethodOfSteps(std::size_t dim, double step, std::vector<double> initial, Field field, std::size_t capacity = 0)
        : history_(dim, step, initial, capacity), field_(std::move(field)), y_(initial), k1_(dim), k2_(dim),
          k3_(dim), k4_(dim), tmp_(dim)
    {
        history_.append(y_);
    }

    double time() const { return history_.front_time(); }
    std::size_t steps_taken() const { return history_.front_node(); }
    std::span<const double> state() const { return history_.value(history_.front_node()); }
    HistoryBuffer& history() { return history_; }
    const HistoryBuffer& history() const { return history_; }

    /// Evaluates and stores the derivative at the front node.
    void complete_front()
    {
        if (front_done_)
            return;
        const std::size_t n = history_.front_node();
        const double t = history_.node_time(n);
        auto y = history_.value(n);
        std::copy(y.begin(), y.end(), y_.begin());
        field_(t, std::span<const double>(y_), LagView(history_, t, y_), std::span<double>(k1_));
        auto d = history_.derivative(n);
        std::copy(k1_.begin(), k1_.end(), d.begin());
        front_done_ = true;
    }

    /// Front state was edited in place; its derivative must be recomputed.
    void invalidate_front() { front_done_ = false; }

    void advance()
    {
        complete_front();
        const std::size_t dim = y_.size();
        const double h = history_.step();
        const double t = time();
        auto stage = [&](const std::vector<double>& k, double c, double ts, std::vector<double>& out) {
            for (std::size_t i = 0; i < dim; ++i)
                tmp_[i] = y_[i] + c * h * k[i];
            field_(ts, std::span<const double>(tmp_), LagView(history_, ts, tmp_), std::span<double>(out));
        };
        stage(k1_, 0.5, t + 0.5 * h, k2_);
        stage(k2_, 0.5, t + 0.5 * h, k3_);
        stage(k3_, 1.0, t + h, k4_);
        for (std::size_t i = 0; i < dim; ++i)
            tmp_[i] = y_[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        history_.append(tmp_);
        front_done_ = false;
    }

private:
    HistoryBuffer history_;
    Field field_;
    std::vector<double> y_, k1_, k2_, k3_, k4_, tmp_;
    bool front_done_ = false;
};

} // namespace refugia
