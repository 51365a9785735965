#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lsinf {

/// Enumeration table for multi-indices |alpha| <= order in nvars variables,
/// graded-lexicographic, with O(1) rank lookup via a base-(order+1) code.
/// Shared and cached per (nvars, order); Jet instances hold a pointer into
/// the cache, so the table address must stay stable for the process lifetime.
class JetSpace {
public:
    JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
        if (nvars < 1 || order < 0)
            throw std::invalid_argument("JetSpace: need nvars >= 1, order >= 0");
        std::vector<int> alpha(nvars, 0);
        for (int deg = 0; deg <= order; ++deg) enumerate(alpha, 0, deg, deg);
        rank_.assign(pow_int(order + 1, nvars), -1);
        factorial_.resize(indices_.size());
        degree_.resize(indices_.size());
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            rank_[code(indices_[i])] = static_cast<int>(i);
            double f = 1.0;
            int d = 0;
            for (int e : indices_[i]) {
                for (int j = 2; j <= e; ++j) f *= j;
                d += e;
            }
            factorial_[i] = f;
            degree_[i] = d;
        }
    }

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<int>& index(std::size_t i) const { return indices_[i]; }
    double factorial(std::size_t i) const { return factorial_[i]; }
    int degree(std::size_t i) const { return degree_[i]; }

    /// Rank of a multi-index, or -1 when |alpha| exceeds the order.
    int rank(const std::vector<int>& alpha) const {
        int deg = 0;
        for (int e : alpha) deg += e;
        if (deg > order_) return -1;
        return rank_[code(alpha)];
    }

    /// Rank of the sum of two stored indices; -1 if the sum leaves the space.
    int rank_of_sum(std::size_t i, std::size_t j) const {
        if (degree_[i] + degree_[j] > order_) return -1;
        long c = code(indices_[i]) + code(indices_[j]);
        return rank_[c];
    }

    static const JetSpace& get(int nvars, int order) {
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(nvars, order);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::make_unique<JetSpace>(nvars, order)).first;
        return *it->second;
    }

private:
    void enumerate(std::vector<int>& alpha, int pos, int left, int deg) {
        if (pos == nvars_ - 1) {
            alpha[pos] = left;
            indices_.push_back(alpha);
            return;
        }
        for (int e = left; e >= 0; --e) {
            alpha[pos] = e;
            enumerate(alpha, pos + 1, left - e, deg);
        }
        alpha[pos] = 0;
    }

    long code(const std::vector<int>& alpha) const {
        long c = 0;
        for (int a = nvars_ - 1; a >= 0; --a) c = c * (order_ + 1) + alpha[a];
        return c;
    }

    static long pow_int(long b, int e) {
        long r = 1;
        while (e-- > 0) r *= b;
        return r;
    }

    int nvars_, order_;
    std::vector<std::vector<int>> indices_;
    std::vector<int> rank_;
    std::vector<double> factorial_;
    std::vector<int> degree_;
};

}  // namespace lsinf
