#include "veridict/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "veridict/util.hpp"

namespace veridict::classifiers {
namespace {

using nlohmann::json;

constexpr double kLossEps = 1e-15;

double clamp_proba(double p) {
    return std::min(1.0 - kLossEps, std::max(kLossEps, p));
}

double logistic_loss(const std::vector<double>& proba, const std::vector<int>& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < proba.size(); ++i) {
        double p = clamp_proba(proba[i]);
        sum -= y[i] ? std::log(p) : std::log(1.0 - p);
    }
    return proba.empty() ? 0.0 : sum / static_cast<double>(proba.size());
}

void check_training_input(const Matrix& X, const std::vector<int>& y) {
    if (X.rows == 0 || X.cols == 0) throw std::invalid_argument("train: empty matrix");
    if (X.rows != y.size()) throw std::invalid_argument("train: X/y size mismatch");
    for (double v : X.data) {
        if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature value");
    }
    bool has0 = false, has1 = false;
    for (int label : y) {
        if (label != 0 && label != 1) throw std::invalid_argument("train: labels must be 0 or 1");
        (label ? has1 : has0) = true;
    }
    if (!has0 || !has1) throw std::invalid_argument("train: need both classes present");
}

// Stable ordering of rows by (feature values, label) so training is a pure
// function of the (x, y) multiset.
std::vector<std::size_t> canonical_order(const Matrix& X, const std::vector<int>& y) {
    std::vector<std::size_t> order(X.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double* ra = X.row(a);
        const double* rb = X.row(b);
        for (std::size_t c = 0; c < X.cols; ++c) {
            if (ra[c] != rb[c]) return ra[c] < rb[c];
        }
        return y[a] < y[b];
    });
    return order;
}

// ---------------------------------------------------------------- random forest

struct RfBuilder {
    const Matrix& X;
    const std::vector<int>& y;
    const RfParams& params;
    std::size_t mtry;
    Tree* tree = nullptr;
    Rng* rng = nullptr;

    int build(std::vector<std::size_t>& rows, int depth) {
        int ones = 0;
        for (std::size_t r : rows) ones += y[r];
        int n = static_cast<int>(rows.size());

        bool pure = ones == 0 || ones == n;
        if (depth >= params.max_depth || pure || n < 2 * params.min_samples_leaf) {
            return make_leaf(ones, n);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> candidates = sample_features();
        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        for (std::size_t f : candidates) {
            vals.clear();
            for (std::size_t r : rows) vals.emplace_back(X.at(r, f), y[r]);
            std::sort(vals.begin(), vals.end());
            int left_n = 0, left_ones = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                left_n += 1;
                left_ones += vals[i].second;
                if (vals[i].first == vals[i + 1].first) continue;
                int right_n = n - left_n;
                if (left_n < params.min_samples_leaf || right_n < params.min_samples_leaf)
                    continue;
                int right_ones = ones - left_ones;
                double impurity = weighted_gini(left_n, left_ones, right_n, right_ones);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = static_cast<int>(f);
                    best_threshold = vals[i].first;  // row goes left when value <= threshold
                }
            }
        }
        if (best_feature < 0) return make_leaf(ones, n);

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (X.at(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows
                                                                               : right_rows)
                .push_back(r);
        }
        int node = static_cast<int>(tree->nodes.size());
        tree->nodes.push_back({best_feature, best_threshold, -1, -1, 0.0});
        int left = build(left_rows, depth + 1);
        int right = build(right_rows, depth + 1);
        tree->nodes[node].left = left;
        tree->nodes[node].right = right;
        return node;
    }

    int make_leaf(int ones, int n) {
        int node = static_cast<int>(tree->nodes.size());
        double vote = 2 * ones >= n ? 1.0 : 0.0;
        tree->nodes.push_back({-1, 0.0, -1, -1, vote});
        return node;
    }

    static double weighted_gini(int ln, int lo, int rn, int ro) {
        auto gini = [](int n, int ones) {
            double p1 = static_cast<double>(ones) / n;
            double p0 = 1.0 - p1;
            return 1.0 - p0 * p0 - p1 * p1;
        };
        double total = ln + rn;
        return (ln / total) * gini(ln, lo) + (rn / total) * gini(rn, ro);
    }

    std::vector<std::size_t> sample_features() {
        std::vector<std::size_t> pool(X.cols);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < mtry; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    rng->next_below(static_cast<std::uint64_t>(pool.size() - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(mtry);
        std::sort(pool.begin(), pool.end());
        return pool;
    }
};

void train_rf(Model& model, const Matrix& X, const std::vector<int>& y) {
    const RfParams& params = model.config.rf;
    std::vector<std::size_t> order = canonical_order(X, y);
    std::size_t n = X.rows;
    std::size_t mtry = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols))));

    model.trees.resize(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(mix_seed(static_cast<std::uint64_t>(model.config.seed),
                                     0x7472656500ULL + static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) {
            rows[i] = order[static_cast<std::size_t>(rng.next_below(n))];
        }
        RfBuilder builder{X, y, params, mtry, &model.trees[static_cast<std::size_t>(t)], &rng};
        builder.build(rows, 0);
    }
}

// ------------------------------------------------------------ gradient boosting

struct GbdtSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

void train_gbdt(Model& model, const Matrix& X, const std::vector<int>& y) {
    const GbdtParams& params = model.config.gbdt;
    std::size_t n = X.rows;
    std::size_t p = X.cols;

    std::vector<std::size_t> order = canonical_order(X, y);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

    // per-feature row indices presorted by (value, canonical rank)
    std::vector<std::vector<std::uint32_t>> sorted(p);
    for (std::size_t f = 0; f < p; ++f) {
        auto& idx = sorted[f];
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), std::uint32_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            double va = X.at(a, f), vb = X.at(b, f);
            if (va != vb) return va < vb;
            return rank[a] < rank[b];
        });
    }

    std::vector<double> scores(n, 0.0);  // base score 0
    std::vector<double> proba(n), grad(n), hess(n);
    std::vector<int> node_of(n);
    model.gbdt_train_loss.reserve(static_cast<std::size_t>(params.rounds));

    for (int round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            proba[i] = sigmoid(scores[i]);
            grad[i] = proba[i] - y[i];
            hess[i] = proba[i] * (1.0 - proba[i]);
        }

        Tree tree;
        tree.nodes.push_back({});
        std::fill(node_of.begin(), node_of.end(), 0);
        std::vector<int> active = {0};

        for (int depth = 0; depth < params.max_depth && !active.empty(); ++depth) {
            std::size_t k = active.size();
            std::vector<int> slot_of(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < k; ++s) slot_of[static_cast<std::size_t>(active[s])] = static_cast<int>(s);

            std::vector<double> G(k, 0.0), H(k, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                int slot = slot_of[static_cast<std::size_t>(node_of[i])];
                if (slot < 0) continue;
                G[static_cast<std::size_t>(slot)] += grad[i];
                H[static_cast<std::size_t>(slot)] += hess[i];
            }

            std::vector<GbdtSplit> best(k);
            std::vector<double> gl(k), hl(k), last_val(k);
            std::vector<char> has_left(k);
            for (std::size_t f = 0; f < p; ++f) {
                std::fill(gl.begin(), gl.end(), 0.0);
                std::fill(hl.begin(), hl.end(), 0.0);
                std::fill(has_left.begin(), has_left.end(), 0);
                for (std::uint32_t r : sorted[f]) {
                    int slot = slot_of[static_cast<std::size_t>(node_of[r])];
                    if (slot < 0) continue;
                    std::size_t s = static_cast<std::size_t>(slot);
                    double v = X.at(r, f);
                    if (has_left[s] && v > last_val[s]) {
                        double hr = H[s] - hl[s];
                        if (hl[s] >= params.min_child_weight && hr >= params.min_child_weight) {
                            double gr = G[s] - gl[s];
                            double gain =
                                0.5 * (gl[s] * gl[s] / (hl[s] + params.lambda) +
                                       gr * gr / (hr + params.lambda) -
                                       G[s] * G[s] / (H[s] + params.lambda));
                            // strict > keeps the earliest (feature, threshold) on ties
                            if (gain > best[s].gain) {
                                best[s] = {gain, static_cast<int>(f), last_val[s]};
                            }
                        }
                    }
                    gl[s] += grad[r];
                    hl[s] += hess[r];
                    last_val[s] = v;
                    has_left[s] = 1;
                }
            }

            std::vector<int> next_active;
            for (std::size_t s = 0; s < k; ++s) {
                int nid = active[s];
                if (best[s].feature < 0 || best[s].gain <= 0.0) continue;  // stays a leaf
                TreeNode& node = tree.nodes[static_cast<std::size_t>(nid)];
                node.feature = best[s].feature;
                node.threshold = best[s].threshold;
                node.left = static_cast<int>(tree.nodes.size());
                node.right = node.left + 1;
                tree.nodes.push_back({});
                tree.nodes.push_back({});
                next_active.push_back(node.left);
                next_active.push_back(node.right);
            }
            if (next_active.empty()) break;
            for (std::size_t i = 0; i < n; ++i) {
                const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
                if (node.is_leaf()) continue;
                node_of[i] = X.at(i, static_cast<std::size_t>(node.feature)) <= node.threshold
                                 ? node.left
                                 : node.right;
            }
            active = std::move(next_active);
        }

        // leaf weights (already scaled by the learning rate)
        std::vector<double> leaf_g(tree.nodes.size(), 0.0), leaf_h(tree.nodes.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t nid = static_cast<std::size_t>(node_of[i]);
            leaf_g[nid] += grad[i];
            leaf_h[nid] += hess[i];
        }
        for (std::size_t nid = 0; nid < tree.nodes.size(); ++nid) {
            TreeNode& node = tree.nodes[nid];
            if (!node.is_leaf()) continue;
            node.value = -params.learning_rate * leaf_g[nid] / (leaf_h[nid] + params.lambda);
        }

        for (std::size_t i = 0; i < n; ++i) {
            scores[i] += tree.nodes[static_cast<std::size_t>(node_of[i])].value;
        }
        model.trees.push_back(std::move(tree));

        std::vector<double> updated(n);
        for (std::size_t i = 0; i < n; ++i) updated[i] = sigmoid(scores[i]);
        model.gbdt_train_loss.push_back(logistic_loss(updated, y));
    }
}

// -------------------------------------------------------------------------- mlp

struct MlpNet {
    std::size_t p = 0;
    std::size_t hidden = 0;
    std::vector<double> w1, b1, w2;
    double b2 = 0.0;

    std::size_t param_count() const { return w1.size() + b1.size() + w2.size() + 1; }

    void init(std::uint64_t seed) {
        Rng rng(seed);
        double limit1 = std::sqrt(6.0 / static_cast<double>(p + hidden));
        w1.resize(hidden * p);
        for (double& w : w1) w = rng.next_double(-limit1, limit1);
        b1.assign(hidden, 0.0);
        double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
        w2.resize(hidden);
        for (double& w : w2) w = rng.next_double(-limit2, limit2);
        b2 = 0.0;
    }

    double forward(const double* x, std::vector<double>& a1) const {
        a1.resize(hidden);
        for (std::size_t h = 0; h < hidden; ++h) {
            double z = b1[h];
            const double* row = &w1[h * p];
            for (std::size_t c = 0; c < p; ++c) z += row[c] * x[c];
            a1[h] = z > 0.0 ? z : 0.0;
        }
        double z2 = b2;
        for (std::size_t h = 0; h < hidden; ++h) z2 += w2[h] * a1[h];
        return sigmoid(z2);
    }

    double batch_loss(const Matrix& X, const std::vector<int>& y,
                      const std::vector<std::size_t>& rows) const {
        std::vector<double> a1;
        double sum = 0.0;
        for (std::size_t r : rows) {
            double out = clamp_proba(forward(X.row(r), a1));
            sum -= y[r] ? std::log(out) : std::log(1.0 - out);
        }
        return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
    }

    // mean-BCE gradients over the batch, laid out [w1, b1, w2, b2]
    std::vector<double> batch_gradients(const Matrix& X, const std::vector<int>& y,
                                        const std::vector<std::size_t>& rows) const {
        std::vector<double> grads(param_count(), 0.0);
        double* gw1 = grads.data();
        double* gb1 = gw1 + w1.size();
        double* gw2 = gb1 + b1.size();
        double* gb2 = gw2 + w2.size();
        std::vector<double> a1;
        double inv = 1.0 / static_cast<double>(rows.size());
        for (std::size_t r : rows) {
            const double* x = X.row(r);
            double out = forward(x, a1);
            double dz2 = (out - y[r]) * inv;
            *gb2 += dz2;
            for (std::size_t h = 0; h < hidden; ++h) {
                gw2[h] += dz2 * a1[h];
                if (a1[h] <= 0.0) continue;  // ReLU gate
                double dz1 = dz2 * w2[h];
                gb1[h] += dz1;
                double* row = &gw1[h * p];
                for (std::size_t c = 0; c < p; ++c) row[c] += dz1 * x[c];
            }
        }
        return grads;
    }

    double* param(std::size_t i) {
        if (i < w1.size()) return &w1[i];
        i -= w1.size();
        if (i < b1.size()) return &b1[i];
        i -= b1.size();
        if (i < w2.size()) return &w2[i];
        return &b2;
    }
};

struct Adam {
    double lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m, v;
    long t = 0;

    Adam(std::size_t params, double lr_in) : lr(lr_in), m(params, 0.0), v(params, 0.0) {}

    void step(MlpNet& net, const std::vector<double>& grads) {
        ++t;
        double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < grads.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
            double mhat = m[i] / c1;
            double vhat = v[i] / c2;
            *net.param(i) -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
};

constexpr double kStdFloor = 1e-8;

Matrix standardize(const Matrix& X, const std::vector<double>& mean,
                   const std::vector<double>& stdev) {
    Matrix out;
    out.rows = X.rows;
    out.cols = X.cols;
    out.data.resize(X.data.size());
    for (std::size_t r = 0; r < X.rows; ++r) {
        for (std::size_t c = 0; c < X.cols; ++c) {
            out.data[r * X.cols + c] = (X.at(r, c) - mean[c]) / stdev[c];
        }
    }
    return out;
}

void train_mlp(Model& model, const Matrix& X, const std::vector<int>& y, const Matrix& val_X,
               const std::vector<int>& val_y) {
    const MlpParams& params = model.config.mlp;
    std::size_t n = X.rows;
    std::size_t p = X.cols;

    model.feat_mean.assign(p, 0.0);
    model.feat_std.assign(p, 0.0);
    std::vector<double> column(n);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t r = 0; r < n; ++r) column[r] = X.at(r, c);
        model.feat_mean[c] = mean_of(column);
        model.feat_std[c] = std::max(kStdFloor, population_stdev(column));
    }
    Matrix Z = standardize(X, model.feat_mean, model.feat_std);
    bool has_val = val_X.rows > 0;
    Matrix Zval = has_val ? standardize(val_X, model.feat_mean, model.feat_std) : Matrix{};

    MlpNet net;
    net.p = p;
    net.hidden = static_cast<std::size_t>(params.hidden);
    net.init(mix_seed(static_cast<std::uint64_t>(model.config.seed), 0x6d6c70ULL));
    Adam adam(net.param_count(), params.lr);

    Rng shuffle_rng(
        mix_seed(static_cast<std::uint64_t>(model.config.seed), 0x65706f6368ULL));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> all_rows = perm;
    std::vector<std::size_t> val_rows(Zval.rows);
    std::iota(val_rows.begin(), val_rows.end(), std::size_t{0});

    double best_loss = std::numeric_limits<double>::infinity();
    MlpNet best = net;
    int bad_epochs = 0;

    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        shuffle_rng.shuffle(perm);
        std::vector<std::size_t> batch;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(params.batch)) {
            std::size_t stop = std::min(n, start + static_cast<std::size_t>(params.batch));
            batch.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                         perm.begin() + static_cast<std::ptrdiff_t>(stop));
            adam.step(net, net.batch_gradients(Z, y, batch));
        }
        double monitored =
            has_val ? net.batch_loss(Zval, val_y, val_rows) : net.batch_loss(Z, y, all_rows);
        if (monitored < best_loss - 1e-12) {
            best_loss = monitored;
            best = net;
            bad_epochs = 0;
        } else if (++bad_epochs >= params.patience) {
            break;
        }
    }

    model.w1 = std::move(best.w1);
    model.b1 = std::move(best.b1);
    model.w2 = std::move(best.w2);
    model.b2 = best.b2;
}

// ---------------------------------------------------------------- serialization

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
        nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
    }
    return nodes;
}

Tree tree_from_json(const json& j) {
    Tree tree;
    for (const json& entry : j) {
        tree.nodes.push_back({entry.at(0).get<int>(), entry.at(1).get<double>(),
                              entry.at(2).get<int>(), entry.at(3).get<int>(),
                              entry.at(4).get<double>()});
    }
    return tree;
}

}  // namespace

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::rf: return "rf";
        case ModelKind::gbdt: return "gbdt";
        case ModelKind::mlp: return "mlp";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "rf") return ModelKind::rf;
    if (lower == "gbdt" || lower == "xgboost") return ModelKind::gbdt;
    if (lower == "mlp") return ModelKind::mlp;
    throw std::invalid_argument("unknown model kind: \"" + std::string(s) + "\"");
}

double Tree::predict_row(const double* row) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        node = &nodes[static_cast<std::size_t>(
            row[node->feature] <= node->threshold ? node->left : node->right)];
    }
    return node->value;
}

Model train(const Matrix& X, const std::vector<int>& y, const Matrix& val_X,
            const std::vector<int>& val_y, const TrainConfig& config,
            const std::string& manifest_fingerprint) {
    check_training_input(X, y);
    if (val_X.rows > 0 && val_X.cols != X.cols)
        throw std::invalid_argument("train: validation width mismatch");
    if (val_X.rows != val_y.size()) throw std::invalid_argument("train: val X/y size mismatch");

    Model model;
    model.kind = config.model;
    model.config = config;
    model.manifest_fingerprint = manifest_fingerprint;
    model.n_features = X.cols;
    switch (config.model) {
        case ModelKind::rf: train_rf(model, X, y); break;
        case ModelKind::gbdt: train_gbdt(model, X, y); break;
        case ModelKind::mlp: train_mlp(model, X, y, val_X, val_y); break;
    }
    return model;
}

std::vector<double> predict_proba(const Model& model, const Matrix& X,
                                  const std::string& manifest_fingerprint) {
    if (manifest_fingerprint != model.manifest_fingerprint)
        throw std::invalid_argument("predict: manifest fingerprint mismatch");
    if (X.cols != model.n_features) throw std::invalid_argument("predict: feature width mismatch");

    std::vector<double> proba(X.rows, 0.0);
    switch (model.kind) {
        case ModelKind::rf: {
            for (std::size_t r = 0; r < X.rows; ++r) {
                double votes = 0.0;
                for (const Tree& tree : model.trees) votes += tree.predict_row(X.row(r));
                proba[r] = model.trees.empty() ? 0.5 : votes / static_cast<double>(model.trees.size());
            }
            break;
        }
        case ModelKind::gbdt: {
            for (std::size_t r = 0; r < X.rows; ++r) {
                double score = 0.0;
                for (const Tree& tree : model.trees) score += tree.predict_row(X.row(r));
                proba[r] = sigmoid(score);
            }
            break;
        }
        case ModelKind::mlp: {
            MlpNet net;
            net.p = model.n_features;
            net.hidden = model.w2.size();
            net.w1 = model.w1;
            net.b1 = model.b1;
            net.w2 = model.w2;
            net.b2 = model.b2;
            std::vector<double> a1, x(model.n_features);
            for (std::size_t r = 0; r < X.rows; ++r) {
                const double* row = X.row(r);
                for (std::size_t c = 0; c < X.cols; ++c)
                    x[c] = (row[c] - model.feat_mean[c]) / model.feat_std[c];
                proba[r] = net.forward(x.data(), a1);
            }
            break;
        }
    }
    return proba;
}

std::vector<int> predict(const Model& model, const Matrix& X,
                         const std::string& manifest_fingerprint, double threshold) {
    std::vector<double> proba = predict_proba(model, X, manifest_fingerprint);
    std::vector<int> labels(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) labels[i] = proba[i] >= threshold ? 1 : 0;
    return labels;
}

json model_to_json(const Model& model) {
    json j;
    j["kind"] = to_string(model.kind);
    j["seed"] = model.config.seed;
    j["manifest_fingerprint"] = model.manifest_fingerprint;
    j["n_features"] = model.n_features;
    switch (model.kind) {
        case ModelKind::rf:
            j["params"] = {{"n_trees", model.config.rf.n_trees},
                           {"max_depth", model.config.rf.max_depth},
                           {"min_samples_leaf", model.config.rf.min_samples_leaf}};
            break;
        case ModelKind::gbdt:
            j["params"] = {{"rounds", model.config.gbdt.rounds},
                           {"learning_rate", model.config.gbdt.learning_rate},
                           {"max_depth", model.config.gbdt.max_depth},
                           {"lambda", model.config.gbdt.lambda},
                           {"min_child_weight", model.config.gbdt.min_child_weight}};
            break;
        case ModelKind::mlp:
            j["params"] = {{"hidden", model.config.mlp.hidden},
                           {"max_epochs", model.config.mlp.max_epochs},
                           {"batch", model.config.mlp.batch},
                           {"lr", model.config.mlp.lr},
                           {"patience", model.config.mlp.patience}};
            break;
    }
    if (model.kind == ModelKind::mlp) {
        j["mlp"] = {{"w1", model.w1}, {"b1", model.b1},     {"w2", model.w2},
                    {"b2", model.b2}, {"mean", model.feat_mean}, {"std", model.feat_std}};
    } else {
        json trees = json::array();
        for (const Tree& tree : model.trees) trees.push_back(tree_to_json(tree));
        j["trees"] = std::move(trees);
        if (model.kind == ModelKind::gbdt) j["train_loss"] = model.gbdt_train_loss;
    }
    return j;
}

Model model_from_json(const json& j) {
    Model model;
    model.kind = parse_model_kind(j.at("kind").get<std::string>());
    model.config.model = model.kind;
    model.config.seed = j.at("seed").get<int>();
    model.manifest_fingerprint = j.at("manifest_fingerprint").get<std::string>();
    model.n_features = j.at("n_features").get<std::size_t>();
    const json& params = j.at("params");
    switch (model.kind) {
        case ModelKind::rf:
            model.config.rf.n_trees = params.at("n_trees").get<int>();
            model.config.rf.max_depth = params.at("max_depth").get<int>();
            model.config.rf.min_samples_leaf = params.at("min_samples_leaf").get<int>();
            break;
        case ModelKind::gbdt:
            model.config.gbdt.rounds = params.at("rounds").get<int>();
            model.config.gbdt.learning_rate = params.at("learning_rate").get<double>();
            model.config.gbdt.max_depth = params.at("max_depth").get<int>();
            model.config.gbdt.lambda = params.at("lambda").get<double>();
            model.config.gbdt.min_child_weight = params.at("min_child_weight").get<double>();
            break;
        case ModelKind::mlp:
            model.config.mlp.hidden = params.at("hidden").get<int>();
            model.config.mlp.max_epochs = params.at("max_epochs").get<int>();
            model.config.mlp.batch = params.at("batch").get<int>();
            model.config.mlp.lr = params.at("lr").get<double>();
            model.config.mlp.patience = params.at("patience").get<int>();
            break;
    }
    if (model.kind == ModelKind::mlp) {
        const json& mlp = j.at("mlp");
        model.w1 = mlp.at("w1").get<std::vector<double>>();
        model.b1 = mlp.at("b1").get<std::vector<double>>();
        model.w2 = mlp.at("w2").get<std::vector<double>>();
        model.b2 = mlp.at("b2").get<double>();
        model.feat_mean = mlp.at("mean").get<std::vector<double>>();
        model.feat_std = mlp.at("std").get<std::vector<double>>();
    } else {
        for (const json& tree : j.at("trees")) model.trees.push_back(tree_from_json(tree));
        if (model.kind == ModelKind::gbdt && j.contains("train_loss"))
            model.gbdt_train_loss = j.at("train_loss").get<std::vector<double>>();
    }
    return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::string payload(kModelMagic);
    payload += "\n";
    payload += model_to_json(model).dump();
    payload += "\n";
    write_file_atomic(path, payload);
}

Model load_model(const std::filesystem::path& path) {
    std::string raw = read_file(path);
    std::size_t newline = raw.find('\n');
    if (newline == std::string::npos || raw.substr(0, newline) != kModelMagic)
        throw std::runtime_error("model file " + path.string() + ": bad magic");
    return model_from_json(json::parse(raw.substr(newline + 1)));
}

double mlp_gradient_check(const Matrix& X, const std::vector<int>& y, int hidden,
                          std::uint64_t seed) {
    MlpNet net;
    net.p = X.cols;
    net.hidden = static_cast<std::size_t>(hidden);
    net.init(seed);

    std::vector<std::size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<double> analytic = net.batch_gradients(X, y, rows);

    constexpr double kEps = 1e-4;
    double worst = 0.0;
    for (std::size_t i = 0; i < net.param_count(); ++i) {
        double* theta = net.param(i);
        double saved = *theta;
        *theta = saved + kEps;
        double plus = net.batch_loss(X, y, rows);
        *theta = saved - kEps;
        double minus = net.batch_loss(X, y, rows);
        *theta = saved;
        double numeric = (plus - minus) / (2.0 * kEps);
        double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

}  // namespace veridict::classifiers
