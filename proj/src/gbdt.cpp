// Leaf-wise gradient-boosted trees over second-order logistic loss, exact
// split search on presorted features. Per-feature index arrays stay
// partitioned by node so each split costs O(node_size * n_features).

#include <algorithm>
#include <cmath>
#include <queue>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/kernels.hpp"
#include "rfqlab/rng.hpp"

namespace rfq {

void GbdtHyperparams::validate() const {
    if (n_estimators < 0 || num_leaves < 1 || min_child_samples < 1)
        throw InvalidHyperparams("gbdt: counts must be positive");
    if (!(learning_rate > 0.0) || !(lambda_leaf >= 0.0))
        throw InvalidHyperparams("gbdt: learning_rate must be positive");
    if (!(subsample > 0.0 && subsample <= 1.0) ||
        !(colsample_bytree > 0.0 && colsample_bytree <= 1.0))
        throw InvalidHyperparams("gbdt: subsample fractions must be in (0,1]");
}

double GbdtTree::predict(const double* row) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

double GbdtModel::predict_row(const double* row) const {
    double s = base_score;
    for (const auto& t : trees) s += learning_rate * t.predict(row);
    s = std::clamp(s, -36.0, 36.0);
    return 1.0 / (1.0 + std::exp(-s));
}

double GbdtModel::predict(double delta, const FeatureBundle& ctx) const {
    return predict_row(layout.row(delta, ctx).data());
}

namespace {

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    int pos = -1; // partition point within the node's range (first right row)
};

struct NodeRange {
    int start = 0, end = 0; // [start, end) into the per-feature order arrays
    double g_sum = 0.0, h_sum = 0.0;
    int tree_node = -1;
    SplitCandidate best;
};

struct Trainer {
    const DesignMatrix& m;
    const GbdtHyperparams& hp;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const std::vector<int>& features; // column subset for this tree
    std::vector<std::vector<int>>& order;

    double leaf_value(double g, double h) const { return -g / (h + hp.lambda_leaf); }
    double score(double g, double h) const { return g * g / (h + hp.lambda_leaf); }

    SplitCandidate best_split(const NodeRange& node) const {
        SplitCandidate best;
        const int count = node.end - node.start;
        if (count < 2 * hp.min_child_samples) return best;
        const double parent = score(node.g_sum, node.h_sum);
        for (int f : features) {
            const auto& ord = order[static_cast<std::size_t>(f)];
            double gl = 0.0, hl = 0.0;
            for (int i = node.start; i + 1 < node.end; ++i) {
                const int row = ord[i];
                gl += grad[row];
                hl += hess[row];
                const double xv = m.row(row)[f];
                const double xn = m.row(ord[i + 1])[f];
                if (xn <= xv) continue; // no boundary between equal values
                const int left_n = i - node.start + 1;
                const int right_n = node.end - i - 1;
                if (left_n < hp.min_child_samples || right_n < hp.min_child_samples) continue;
                const double gain =
                    0.5 * (score(gl, hl) + score(node.g_sum - gl, node.h_sum - hl) - parent);
                if (gain > best.gain + 1e-15) {
                    best = {gain, f, 0.5 * (xv + xn), i + 1};
                }
            }
        }
        return best;
    }

    // Re-partition every feature's order segment by the chosen split.
    void partition(const NodeRange& node, const SplitCandidate& split,
                   std::vector<char>& side_buf, std::vector<int>& tmp) const {
        for (int i = node.start; i < node.end; ++i) {
            const int row = order[static_cast<std::size_t>(split.feature)][i];
            side_buf[row] = m.row(row)[split.feature] <= split.threshold ? 0 : 1;
        }
        for (std::size_t f = 0; f < order.size(); ++f) {
            auto& ord = order[f];
            int l = 0, r = 0;
            tmp.resize(node.end - node.start);
            const int n_left = split.pos - node.start;
            for (int i = node.start; i < node.end; ++i) {
                const int row = ord[i];
                if (side_buf[row] == 0)
                    ord[node.start + l++] = row;
                else
                    tmp[r++] = row;
            }
            std::copy(tmp.begin(), tmp.begin() + r, ord.begin() + node.start + n_left);
        }
    }
};

} // namespace

GbdtModel fit_gbdt(const Dataset& train, const GbdtHyperparams& hp, std::uint64_t seed) {
    hp.validate();
    DesignMatrix m = DesignMatrix::build(train);
    const std::size_t n = m.n;
    const int d = static_cast<int>(m.layout.size());

    std::size_t n_pos = 0;
    for (int v : m.y) n_pos += v;
    if (n_pos == 0 || n_pos == n) throw DegenerateData("fit_gbdt: single-class data");

    GbdtModel model;
    model.layout = m.layout;
    model.learning_rate = hp.learning_rate;
    model.hyperparams = hp;
    model.feature_gain.assign(d, 0.0);
    const BinaryClassWeights cw =
        hp.class_weight ? BinaryClassWeights::balanced(m.y) : BinaryClassWeights{};
    const double wpos = cw(1) * static_cast<double>(n_pos);
    const double wneg = cw(0) * static_cast<double>(n - n_pos);
    model.base_score = std::log(wpos / wneg);

    std::vector<double> score(n, model.base_score), prob(n), grad(n), hess(n);
    std::vector<char> side(n);
    std::vector<int> tmp;

    // global presort per feature; each tree re-sorts only its subsample
    std::vector<std::vector<int>> full_order(d);
    for (int f = 0; f < d; ++f) {
        auto& ord = full_order[f];
        ord.resize(n);
        for (std::size_t i = 0; i < n; ++i) ord[i] = static_cast<int>(i);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
            return m.row(a)[f] < m.row(b)[f];
        });
    }

    std::vector<std::vector<int>> order(d);
    for (int t = 0; t < hp.n_estimators; ++t) {
        RngStream rng(salt_seed(seed, 0x9bd7), t);
        std::vector<char> in_bag(n, 1);
        if (hp.subsample < 1.0)
            for (std::size_t i = 0; i < n; ++i) in_bag[i] = rng.bernoulli(hp.subsample) ? 1 : 0;

        std::vector<int> feats;
        if (hp.colsample_bytree < 1.0) {
            std::vector<int> all(d);
            for (int f = 0; f < d; ++f) all[f] = f;
            const int keep = std::max(1, static_cast<int>(std::floor(hp.colsample_bytree * d)));
            for (int k = 0; k < keep; ++k)
                std::swap(all[k], all[rng.uniform_int(k, d - 1)]);
            feats.assign(all.begin(), all.begin() + keep);
            std::sort(feats.begin(), feats.end());
        } else {
            feats.resize(d);
            for (int f = 0; f < d; ++f) feats[f] = f;
        }

        kernels::sigmoid_batch(score.data(), prob.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = cw(m.y[i]);
            grad[i] = w * (prob[i] - m.y[i]);
            hess[i] = std::max(w * prob[i] * (1.0 - prob[i]), 1e-12);
        }

        int n_bag = 0;
        for (int f = 0; f < d; ++f) {
            auto& ord = order[f];
            ord.clear();
            for (int row : full_order[f])
                if (in_bag[row]) ord.push_back(row);
        }
        n_bag = static_cast<int>(order[0].size());
        if (n_bag < 2 * hp.min_child_samples) continue; // nothing to learn this round

        GbdtTree tree;
        Trainer trainer{m, hp, grad, hess, feats, order};

        NodeRange root;
        root.start = 0;
        root.end = n_bag;
        for (int i = 0; i < n_bag; ++i) {
            root.g_sum += grad[order[0][i]];
            root.h_sum += hess[order[0][i]];
        }
        tree.nodes.push_back({-1, 0.0, -1, -1, trainer.leaf_value(root.g_sum, root.h_sum), 0.0});
        root.tree_node = 0;
        root.best = trainer.best_split(root);

        auto cmp = [](const NodeRange& a, const NodeRange& b) { return a.best.gain < b.best.gain; };
        std::priority_queue<NodeRange, std::vector<NodeRange>, decltype(cmp)> heap(cmp);
        heap.push(root);
        int leaves = 1;
        while (leaves < hp.num_leaves && !heap.empty()) {
            NodeRange node = heap.top();
            heap.pop();
            if (node.best.feature < 0 || node.best.gain <= 0.0) break; // best-first: rest is worse
            trainer.partition(node, node.best, side, tmp);

            NodeRange left, right;
            left.start = node.start;
            left.end = node.best.pos;
            right.start = node.best.pos;
            right.end = node.end;
            for (int i = left.start; i < left.end; ++i) {
                left.g_sum += grad[order[node.best.feature][i]];
                left.h_sum += hess[order[node.best.feature][i]];
            }
            right.g_sum = node.g_sum - left.g_sum;
            right.h_sum = node.h_sum - left.h_sum;

            const int left_idx = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back(
                {-1, 0.0, -1, -1, trainer.leaf_value(left.g_sum, left.h_sum), 0.0});
            const int right_idx = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back(
                {-1, 0.0, -1, -1, trainer.leaf_value(right.g_sum, right.h_sum), 0.0});
            GbdtNode& parent = tree.nodes[node.tree_node]; // after both push_backs
            parent.feature = node.best.feature;
            parent.threshold = node.best.threshold;
            parent.gain = node.best.gain;
            parent.left = left_idx;
            parent.right = right_idx;
            model.feature_gain[node.best.feature] += node.best.gain;
            left.tree_node = left_idx;
            right.tree_node = right_idx;
            ++leaves;
            if (leaves >= hp.num_leaves) break;
            left.best = trainer.best_split(left);
            right.best = trainer.best_split(right);
            heap.push(left);
            heap.push(right);
        }

        for (std::size_t i = 0; i < n; ++i)
            score[i] += hp.learning_rate * tree.predict(m.row(i));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

} // namespace rfq
