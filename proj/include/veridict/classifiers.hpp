#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "veridict/matrix.hpp"

namespace veridict::classifiers {

enum class ModelKind { rf, gbdt, mlp };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct RfParams {
    int n_trees = 200;
    int max_depth = 12;
    int min_samples_leaf = 2;
    // features per split = max(1, floor(sqrt(p)))
};

struct GbdtParams {
    int rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 6;
    double lambda = 1.0;
    double min_child_weight = 1.0;
};

struct MlpParams {
    int hidden = 64;
    int max_epochs = 500;
    int batch = 16;
    double lr = 1e-3;
    int patience = 20;
};

struct TrainConfig {
    ModelKind model = ModelKind::rf;
    int seed = 0;
    RfParams rf;
    GbdtParams gbdt;
    MlpParams mlp;
};

struct TreeNode {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf payload: rf vote or scaled gbdt weight

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at index 0
    // rows go left when row[feature] <= threshold
    double predict_row(const double* row) const;
};

struct Model {
    ModelKind kind = ModelKind::rf;
    TrainConfig config;
    std::string manifest_fingerprint;
    std::size_t n_features = 0;

    std::vector<Tree> trees;              // rf, gbdt
    std::vector<double> gbdt_train_loss;  // logistic loss after each round

    // mlp: input -> hidden (ReLU) -> 1 (sigmoid), z-scored inputs
    std::vector<double> w1;  // hidden x p, row-major
    std::vector<double> b1;
    std::vector<double> w2;  // hidden
    double b2 = 0.0;
    std::vector<double> feat_mean, feat_std;
};

/// Trees ignore the validation split; the MLP early-stops on its loss.
Model train(const Matrix& X, const std::vector<int>& y, const Matrix& val_X,
            const std::vector<int>& val_y, const TrainConfig& config,
            const std::string& manifest_fingerprint);

std::vector<double> predict_proba(const Model& model, const Matrix& X,
                                  const std::string& manifest_fingerprint);

std::vector<int> predict(const Model& model, const Matrix& X,
                         const std::string& manifest_fingerprint, double threshold = 0.5);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

inline constexpr std::string_view kModelMagic = "VRD1";

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Max relative error between analytic MLP gradients and central finite
/// differences (eps = 1e-4) on the given batch, with seeded random weights.
double mlp_gradient_check(const Matrix& X, const std::vector<int>& y, int hidden,
                          std::uint64_t seed);

double sigmoid(double z);

}  // namespace veridict::classifiers
