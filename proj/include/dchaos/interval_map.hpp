#pragma once

// Maps of [0,1] iterated in IEEE double precision (53-bit significand).
// Distances are |f^n x - f^n y| and are estimates, not exact values.

#include <dchaos/distance.hpp>
#include <dchaos/index_seq.hpp>

#include <charconv>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace dchaos {

class IntervalMap {
public:
    enum class Kind { Tent, Logistic, PiecewiseLinear };

    static IntervalMap tent(double slope) {
        if (!(slope >= 0.0 && slope <= 2.0)) throw InvalidArgument("tent slope must lie in [0,2] to map [0,1] into itself");
        IntervalMap m(Kind::Tent);
        m.param_ = slope;
        return m;
    }

    static IntervalMap logistic(double r) {
        if (!(r >= 0.0 && r <= 4.0)) throw InvalidArgument("logistic parameter must lie in [0,4] to map [0,1] into itself");
        IntervalMap m(Kind::Logistic);
        m.param_ = r;
        return m;
    }

    /// Breakpoints (x_0 = 0, y_0), …, (x_k = 1, y_k), x strictly increasing, y in [0,1].
    static IntervalMap piecewise_linear(std::vector<std::pair<double, double>> pts) {
        if (pts.size() < 2) throw InvalidArgument("pwl map needs at least two breakpoints");
        if (pts.front().first != 0.0 || pts.back().first != 1.0)
            throw InvalidArgument("pwl breakpoints must start at x=0 and end at x=1");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!(pts[i].second >= 0.0 && pts[i].second <= 1.0))
                throw InvalidArgument("pwl value at breakpoint " + std::to_string(i) + " leaves [0,1]");
            if (i > 0 && !(pts[i].first > pts[i - 1].first))
                throw InvalidArgument("pwl breakpoints must have strictly increasing x");
        }
        IntervalMap m(Kind::PiecewiseLinear);
        m.points_ = std::move(pts);
        return m;
    }

    /// "tent:2.0", "logistic:4.0", "pwl:0,0;0.5,1;1,0"
    static IntervalMap parse(const std::string& spec) {
        auto colon = spec.find(':');
        if (colon == std::string::npos) throw InvalidArgument("map spec '" + spec + "' lacks a ':'");
        const std::string kind = spec.substr(0, colon);
        const std::string rest = spec.substr(colon + 1);
        if (kind == "tent") return tent(parse_double(rest));
        if (kind == "logistic") return logistic(parse_double(rest));
        if (kind == "pwl") {
            std::vector<std::pair<double, double>> pts;
            std::stringstream ss(rest);
            std::string item;
            while (std::getline(ss, item, ';')) {
                auto comma = item.find(',');
                if (comma == std::string::npos) throw InvalidArgument("pwl breakpoint '" + item + "' is not x,y");
                pts.emplace_back(parse_double(item.substr(0, comma)), parse_double(item.substr(comma + 1)));
            }
            return piecewise_linear(std::move(pts));
        }
        throw InvalidArgument("unknown map kind '" + kind + "'");
    }

    std::string spec() const {
        switch (kind_) {
        case Kind::Tent: return "tent:" + format(param_);
        case Kind::Logistic: return "logistic:" + format(param_);
        case Kind::PiecewiseLinear: {
            std::string s = "pwl:";
            for (std::size_t i = 0; i < points_.size(); ++i)
                s += (i ? ";" : "") + format(points_[i].first) + "," + format(points_[i].second);
            return s;
        }
        }
        return {};
    }

    Kind kind() const { return kind_; }

    double operator()(double x) const {
        switch (kind_) {
        case Kind::Tent: return x <= 0.5 ? param_ * x : param_ * (1.0 - x);
        case Kind::Logistic: return param_ * x * (1.0 - x);
        case Kind::PiecewiseLinear: {
            auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                       [](double v, const std::pair<double, double>& p) { return v < p.first; });
            if (it == points_.end()) return points_.back().second;
            if (it == points_.begin()) return points_.front().second;
            const auto& [x1, y1] = *it;
            const auto& [x0, y0] = *std::prev(it);
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
        }
        return x;
    }

private:
    explicit IntervalMap(Kind k) : kind_(k) {}

    static double parse_double(const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("not a number: '" + s + "'");
        }
        if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
        return v;
    }

    static std::string format(double v) {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, p);
    }

    Kind kind_;
    double param_ = 0;
    std::vector<std::pair<double, double>> points_;
};

/// Two orbits under one interval map with a cache of distances by time.
class IntervalOrbitPair {
public:
    static constexpr double domain_tolerance = 1e-12;

    IntervalOrbitPair(std::shared_ptr<const IntervalMap> map, double x, double y, std::uint64_t max_iterations)
        : map_(std::move(map)), state_(std::make_shared<State>()), max_iterations_(max_iterations) {
        check_domain(x, 0);
        check_domain(y, 0);
        state_->x = x;
        state_->y = y;
        state_->dist.push_back(std::fabs(x - y));
        x0_ = x;
        y0_ = y;
    }

    double x0() const { return x0_; }
    double y0() const { return y0_; }
    std::uint64_t max_iterations() const { return max_iterations_; }

    double distance_at(std::uint64_t n) const {
        if (n > max_iterations_) throw BudgetExceeded(n, max_iterations_);
        std::lock_guard lock(state_->mutex);
        while (state_->dist.size() <= n) {
            const std::uint64_t t = state_->dist.size();
            state_->x = step((*map_)(state_->x), t);
            state_->y = step((*map_)(state_->y), t);
            state_->dist.push_back(std::fabs(state_->x - state_->y));
        }
        return state_->dist[n];
    }

    bool is_diagonal() const { return x0_ == y0_; }

private:
    struct State {
        std::mutex mutex;
        double x = 0, y = 0;
        std::vector<double> dist;
    };

    static void check_domain(double v, std::uint64_t t) {
        if (!(v >= -domain_tolerance && v <= 1.0 + domain_tolerance))
            throw Error("orbit left [0,1] at time " + std::to_string(t));
    }

    static double step(double v, std::uint64_t t) {
        check_domain(v, t);
        return std::clamp(v, 0.0, 1.0);
    }

    std::shared_ptr<const IntervalMap> map_;
    std::shared_ptr<State> state_;
    std::uint64_t max_iterations_;
    double x0_ = 0, y0_ = 0;
};

class IntervalSystem {
public:
    using Point = double;
    using Pair = IntervalOrbitPair;
    using Distance = double;
    static constexpr bool exact = false;

    explicit IntervalSystem(IntervalMap map, std::uint64_t max_iterations = 10'000'000)
        : map_(std::make_shared<const IntervalMap>(std::move(map))), max_iterations_(max_iterations) {}

    const IntervalMap& map() const { return *map_; }
    std::uint64_t max_iterations() const { return max_iterations_; }

    IntervalOrbitPair pair(double x, double y) const { return IntervalOrbitPair(map_, x, y, max_iterations_); }

    /// |f^r x - x|
    double self_distance(double x, std::uint64_t r) const {
        if (r > max_iterations_) throw BudgetExceeded(r, max_iterations_);
        double v = x;
        for (std::uint64_t i = 0; i < r; ++i) v = std::clamp((*map_)(v), 0.0, 1.0);
        return std::fabs(v - x);
    }

private:
    std::shared_ptr<const IntervalMap> map_;
    std::uint64_t max_iterations_;
};

/// [d(m_1), …, d(m_count)]; interval pairs iterate once up to max(times).
template <class Pair>
auto distance_series(const Pair& pair, const IndexSequence& times, std::size_t count) {
    using D = decltype(pair.distance_at(0));
    std::vector<D> out;
    out.reserve(count);
    for (auto m : times.take(count)) out.push_back(pair.distance_at(m));
    return out;
}

} // namespace dchaos
