#include "tshs/gbdt.hpp"

#include "tshs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace tshs {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<std::vector<float>> quantile_cuts(const Matrix& x, int bins) {
    std::vector<std::vector<float>> cuts(static_cast<size_t>(x.cols));
    std::vector<float> column(static_cast<size_t>(x.rows));
    for (int64_t c = 0; c < x.cols; ++c) {
        for (int64_t r = 0; r < x.rows; ++r)
            column[static_cast<size_t>(r)] = x.at(r, c);
        std::sort(column.begin(), column.end());
        auto& out = cuts[static_cast<size_t>(c)];
        for (int b = 1; b < bins; ++b) {
            auto rank = static_cast<size_t>((static_cast<uint64_t>(x.rows) * static_cast<uint64_t>(b)) /
                                            static_cast<uint64_t>(bins));
            if (rank >= column.size())
                break;
            float v = column[rank];
            if (out.empty() || v > out.back())
                out.push_back(v);
        }
    }
    return cuts;
}

uint8_t bin_of(float v, const std::vector<float>& cuts) {
    // bin b collects values in (cuts[b-1], cuts[b]]; the last bin is open.
    auto it = std::lower_bound(cuts.begin(), cuts.end(), v);
    return static_cast<uint8_t>(it - cuts.begin());
}

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    int bin = -1; // highest bin index routed left
};

} // namespace

Gbdt Gbdt::fit(const Matrix& x, const std::vector<int>& y, const GbdtParams& params) {
    if (x.rows == 0 || x.cols == 0)
        throw DataError("empty training matrix");
    if (std::cmp_not_equal(y.size(), x.rows))
        throw DataError("label count does not match row count");

    Gbdt model;
    model.cuts_ = quantile_cuts(x, params.bins);

    auto n = static_cast<size_t>(x.rows);
    auto d = static_cast<size_t>(x.cols);

    std::vector<uint8_t> binned(n * d);
    int max_bins = 1;
    for (size_t c = 0; c < d; ++c)
        max_bins = std::max(max_bins, static_cast<int>(model.cuts_[c].size()) + 1);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < d; ++c)
            binned[r * d + c] =
                bin_of(x.at(static_cast<int64_t>(r), static_cast<int64_t>(c)), model.cuts_[c]);

    double pos = 0.0;
    for (int label : y)
        pos += label;
    double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    model.base_score_ = std::log(prior / (1.0 - prior));

    std::vector<double> margin(n, model.base_score_);
    std::vector<double> grad(n), hess(n);
    std::vector<int> node_of(n);
    const double lambda = params.lambda_l2;

    std::vector<double> hist_g(d * static_cast<size_t>(max_bins));
    std::vector<double> hist_h(d * static_cast<size_t>(max_bins));

    for (int t = 0; t < params.trees; ++t) {
        for (size_t r = 0; r < n; ++r) {
            double p = sigmoid(margin[r]);
            grad[r] = p - y[r];
            hess[r] = std::max(p * (1.0 - p), 1e-16);
        }

        Tree tree(1);
        std::vector<int> split_bin(1, -1); // routing by bin index during growth
        std::fill(node_of.begin(), node_of.end(), 0);
        std::vector<int> frontier = {0};

        for (int level = 0; level <= params.depth && !frontier.empty(); ++level) {
            std::vector<double> node_g(tree.size(), 0.0), node_h(tree.size(), 0.0);
            for (size_t r = 0; r < n; ++r) {
                node_g[static_cast<size_t>(node_of[r])] += grad[r];
                node_h[static_cast<size_t>(node_of[r])] += hess[r];
            }

            std::vector<int> next_frontier;
            for (int node : frontier) {
                auto nodeu = static_cast<size_t>(node);
                double total_g = node_g[nodeu], total_h = node_h[nodeu];

                SplitChoice best;
                if (level < params.depth) {
                    std::fill(hist_g.begin(), hist_g.end(), 0.0);
                    std::fill(hist_h.begin(), hist_h.end(), 0.0);
                    for (size_t r = 0; r < n; ++r) {
                        if (node_of[r] != node)
                            continue;
                        const uint8_t* row = binned.data() + r * d;
                        double g = grad[r], h = hess[r];
                        for (size_t c = 0; c < d; ++c) {
                            size_t cell = c * static_cast<size_t>(max_bins) + row[c];
                            hist_g[cell] += g;
                            hist_h[cell] += h;
                        }
                    }
                    double parent_obj = total_g * total_g / (total_h + lambda);
                    for (size_t c = 0; c < d; ++c) {
                        int nbins = static_cast<int>(model.cuts_[c].size()) + 1;
                        double left_g = 0.0, left_h = 0.0;
                        for (int b = 0; b + 1 < nbins; ++b) {
                            size_t cell = c * static_cast<size_t>(max_bins) + static_cast<size_t>(b);
                            left_g += hist_g[cell];
                            left_h += hist_h[cell];
                            double right_g = total_g - left_g;
                            double right_h = total_h - left_h;
                            if (left_h < params.min_child_hessian ||
                                right_h < params.min_child_hessian)
                                continue;
                            double gain = 0.5 * (left_g * left_g / (left_h + lambda) +
                                                 right_g * right_g / (right_h + lambda) - parent_obj);
                            if (gain > best.gain)
                                best = {gain, static_cast<int>(c), b};
                        }
                    }
                }

                if (best.feature < 0) {
                    tree[nodeu].value = -params.learning_rate * total_g / (total_h + lambda);
                    continue;
                }
                tree[nodeu].feature = best.feature;
                tree[nodeu].cut =
                    model.cuts_[static_cast<size_t>(best.feature)][static_cast<size_t>(best.bin)];
                split_bin[nodeu] = best.bin;
                tree[nodeu].left = static_cast<int>(tree.size());
                tree.emplace_back();
                split_bin.push_back(-1);
                tree[nodeu].right = static_cast<int>(tree.size());
                tree.emplace_back();
                split_bin.push_back(-1);
                next_frontier.push_back(tree[nodeu].left);
                next_frontier.push_back(tree[nodeu].right);
            }

            for (size_t r = 0; r < n; ++r) {
                int node = node_of[r];
                const Node& nd = tree[static_cast<size_t>(node)];
                if (nd.feature < 0)
                    continue;
                const uint8_t* row = binned.data() + r * d;
                node_of[r] =
                    row[nd.feature] <= split_bin[static_cast<size_t>(node)] ? nd.left : nd.right;
            }
            frontier = std::move(next_frontier);
        }

        for (size_t r = 0; r < n; ++r)
            margin[r] += tree[static_cast<size_t>(node_of[r])].value;
        model.trees_.push_back(std::move(tree));
    }
    return model;
}

double Gbdt::predict_margin(std::span<const float> row) const {
    double score = base_score_;
    for (const Tree& tree : trees_) {
        int node = 0;
        while (tree[static_cast<size_t>(node)].feature >= 0) {
            const Node& nd = tree[static_cast<size_t>(node)];
            node = row[static_cast<size_t>(nd.feature)] <= nd.cut ? nd.left : nd.right;
        }
        score += tree[static_cast<size_t>(node)].value;
    }
    return score;
}

double Gbdt::predict_prob(std::span<const float> row) const { return sigmoid(predict_margin(row)); }

std::vector<double> Gbdt::predict_prob(const Matrix& x) const {
    std::vector<double> out(static_cast<size_t>(x.rows));
    for (int64_t r = 0; r < x.rows; ++r)
        out[static_cast<size_t>(r)] = predict_prob(x.row(r));
    return out;
}

double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DataError("auc: score/label size mismatch");
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    int64_t n_pos = 0, n_neg = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]])
            ++j;
        double mid_rank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1 .. j share the midrank
        for (size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1)
                pos_rank_sum += mid_rank;
        }
        i = j;
    }
    for (int label : labels)
        (label == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("auc: need both classes");
    double u = pos_rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

} // namespace tshs
