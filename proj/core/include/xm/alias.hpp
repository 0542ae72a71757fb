#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "xm/errors.hpp"

namespace xm {

// Walker/Vose alias table: O(n) setup, O(1) weighted draws. Construction is
// deterministic for a given weight vector.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights) {
        const std::size_t n = weights.size();
        if (n == 0) throw ConfigError("AliasTable: empty weight vector");
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ConfigError("AliasTable: negative weight");
            total += w;
        }
        if (total <= 0.0) throw ConfigError("AliasTable: weights sum to zero");

        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * n / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back();
            const std::size_t l = large.back();
            small.pop_back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (std::size_t i : large) prob_[i] = 1.0;
        for (std::size_t i : small) prob_[i] = 1.0;  // leftover roundoff
    }

    std::size_t size() const { return prob_.size(); }

    template <typename Rng>
    std::size_t sample(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> slot(0, prob_.size() - 1);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        const std::size_t i = slot(rng);
        return coin(rng) < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace xm
