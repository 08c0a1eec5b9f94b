#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tshs {

struct Matrix {
    int64_t rows = 0;
    int64_t cols = 0;
    std::vector<float> data; // row-major

    Matrix() = default;
    Matrix(int64_t r, int64_t c) : rows(r), cols(c), data(static_cast<size_t>(r * c), 0.0f) {}

    float& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols + c)]; }
    float at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols + c)]; }
    std::span<const float> row(int64_t r) const {
        return {data.data() + r * cols, static_cast<size_t>(cols)};
    }
};

struct GbdtParams {
    int trees = 100;
    int depth = 6;
    double learning_rate = 0.1;
    int bins = 64;
    double lambda_l2 = 1.0;
    double min_child_hessian = 1e-3;
};

// Binary gradient-boosted trees with histogram splits and logistic loss.
// Deterministic: no row or feature subsampling.
class Gbdt {
public:
    static Gbdt fit(const Matrix& x, const std::vector<int>& y, const GbdtParams& params = {});

    double predict_margin(std::span<const float> row) const;
    double predict_prob(std::span<const float> row) const;
    std::vector<double> predict_prob(const Matrix& x) const;

    int tree_count() const { return static_cast<int>(trees_.size()); }

private:
    struct Node {
        int feature = -1;
        float cut = 0.0f; // go left when x[feature] <= cut
        int left = -1;
        int right = -1;
        double value = 0.0; // leaf weight, learning rate folded in
    };
    using Tree = std::vector<Node>;

    double base_score_ = 0.0;
    std::vector<Tree> trees_;
    std::vector<std::vector<float>> cuts_; // per-feature bin upper edges
};

// Rank-based AUC with midrank tie handling. Labels are 0/1.
double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& labels);

} // namespace tshs
