#include "xyloops/strand_law.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace xyl {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

struct Margin {
    int type;
    int count;
};

// All nonnegative integer matrices with the given row and column sums.
template <class F>
void for_each_table(const std::vector<Margin>& rows, const std::vector<Margin>& cols, F&& visit) {
    int R = int(rows.size()), C = int(cols.size());
    std::vector<int> cap(C), table(R * C, 0);
    for (int j = 0; j < C; ++j) cap[j] = cols[j].count;
    auto fill_row = [&](auto&& self, int i, int j, int left) -> void {
        if (i == R) {
            visit(table);
            return;
        }
        if (j == C - 1) {
            if (left > cap[j]) return;
            table[i * C + j] = left;
            cap[j] -= left;
            self(self, i + 1, 0, i + 1 < R ? rows[i + 1].count : 0);
            cap[j] += left;
            table[i * C + j] = 0;
            return;
        }
        int hi = std::min(left, cap[j]);
        for (int x = 0; x <= hi; ++x) {
            table[i * C + j] = x;
            cap[j] -= x;
            self(self, i, j + 1, left - x);
            cap[j] += x;
        }
        table[i * C + j] = 0;
    };
    if (R == 0 || C == 0) {
        visit(table);
        return;
    }
    fill_row(fill_row, 0, 0, rows[0].count);
}

}  // namespace

StrandLaw::StrandLaw(int num_vertices, const std::vector<StrandBundle>& bundles, const std::vector<int>& phi,
                     const std::vector<int>& kept, double max_states)
    : V_(num_vertices), start_(num_vertices, -1), end_(num_vertices, -1) {
    if (int(phi.size()) != V_) throw std::invalid_argument("strand law: phi has the wrong length");
    K_ = V_;
    for (int v = 0; v < V_; ++v)
        if (phi[v] > 0) start_[v] = K_++;
    for (int v = 0; v < V_; ++v)
        if (phi[v] < 0) end_[v] = K_++;

    std::vector<char> is_kept(V_, 0);
    for (int v : kept) is_kept.at(v) = 1;

    std::vector<short> init(K_ * K_, 0);
    std::vector<long> weight(V_, 0);
    for (const auto& b : bundles) {
        if (b.count < 0) throw std::invalid_argument("strand law: negative copy count");
        init[b.from * K_ + b.to] += short(b.count);
        weight[b.from] += b.count;
        weight[b.to] += b.count;
    }
    std::vector<int> order;
    for (int v = 0; v < V_; ++v)
        if (!is_kept[v]) order.push_back(v);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return weight[x] < weight[y]; });

    std::map<std::vector<short>, double> states{{init, 1.0}};
    for (int v : order) {
        std::map<std::vector<short>, double> next;
        for (const auto& [T, p] : states) {
            std::vector<Margin> rows, cols;
            for (int x = 0; x < K_; ++x)
                if (x != v && T[x * K_ + v] > 0) rows.push_back({x, T[x * K_ + v]});
            if (start_[v] >= 0) rows.push_back({start_[v], phi[v]});
            for (int y = 0; y < K_; ++y)
                if (y != v && T[v * K_ + y] > 0) cols.push_back({y, T[v * K_ + y]});
            if (end_[v] >= 0) cols.push_back({end_[v], -phi[v]});
            int A = 0, B = 0;
            double base = 0.0;
            for (const auto& r : rows) A += r.count, base += log_factorial(r.count);
            for (const auto& c : cols) B += c.count, base += log_factorial(c.count);
            if (A != B) throw std::invalid_argument("strand law: unbalanced ends at vertex " + std::to_string(v));
            base -= log_factorial(A);
            std::vector<short> cleared = T;
            for (int k = 0; k < K_; ++k) cleared[k * K_ + v] = cleared[v * K_ + k] = 0;
            int C = int(cols.size());
            for_each_table(rows, cols, [&](const std::vector<int>& N) {
                double lp = base;
                std::vector<short> out = cleared;
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (int j = 0; j < C; ++j) {
                        int x = N[i * C + j];
                        if (x == 0) continue;
                        lp -= log_factorial(x);
                        out[rows[i].type * K_ + cols[j].type] += short(x);
                    }
                next[std::move(out)] += p * std::exp(lp);
            });
            if (double(next.size()) > max_states) throw std::length_error("strand law: state space too large");
        }
        states.swap(next);
    }
    outcomes_.reserve(states.size());
    for (auto& [T, p] : states) outcomes_.push_back({T, p});
}

int StrandLaw::start_type(int v) const { return start_.at(v); }
int StrandLaw::end_type(int v) const { return end_.at(v); }

std::vector<double> strand_count_law(int num_vertices, const std::vector<StrandBundle>& bundles, int a, int b) {
    StrandLaw law(num_vertices, bundles, std::vector<int>(num_vertices, 0), {a, b});
    std::vector<double> pm;
    for (const auto& o : law.outcomes()) {
        int m = law.count(o, a, b);
        if (int(pm.size()) <= m) pm.resize(m + 1, 0.0);
        pm[m] += o.prob;
    }
    if (pm.empty()) pm.push_back(0.0);
    return pm;
}

}  // namespace xyl
