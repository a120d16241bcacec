#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "paragram/eval.hpp"
#include "paragram/kg.hpp"
#include "paragram/model.hpp"

namespace paragram {

struct TrainConfig {
    std::size_t dim = 50;
    Variant variant = Variant::Base;
    double learning_rate = 1e-3;
    double margin = 3.0;                   // loss margin γ
    double adversarial_temperature = 2.0;  // α
    int negatives_per_positive = 50;
    int batch_size = 512;
    int max_epochs = 1000;
    int patience_epochs = 100;
    double min_hits10_gain = 0.005;  // relative improvement that resets patience
    double d_min = 0.0;              // lower bound on |1 - r_h*r_t|
    std::uint64_t seed = 42;

    void validate() const;
};

// Flat JSON or key=value lines mirroring the TrainConfig fields.
TrainConfig parse_train_config(const std::string& text);

using Rng = std::mt19937_64;

// Uniformly corrupts head or tail with a uniform entity, resampling until the
// corrupted triple is absent from the train split. Throws after a bounded
// number of retries (no negative may exist).
std::vector<Triple> sample_negatives(const KnowledgeGraph& kg, const Triple& positive, int n,
                                     Rng& rng);

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected update; throws on non-finite gradients.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               double learning_rate);

// Free parameters plus the materialized model. Stored entity, center, and
// slope values are tanh of the free values; widths are softplus. Variant
// constraints (zero widths/centers, shared slopes, one band) are structural:
// masked tensors carry no gradient and keep their forced values.
class TrainableModel {
   public:
    TrainableModel(const KnowledgeGraph& kg, const TrainConfig& cfg);

    const ModelConfig& model() const { return model_; }
    const TrainConfig& config() const { return cfg_; }

    std::vector<double>& theta() { return theta_; }
    const std::vector<double>& theta() const { return theta_; }
    std::size_t n_params() const { return theta_.size(); }

    // Rematerializes stored values from the free parameters.
    void refresh();

    // Rescales slope pairs minimally so |1 - r_h*r_t| >= d_min elementwise,
    // keeping free and stored values consistent.
    void project_constraints(double d_min);

    // L = -log σ(γ + s(pos)) - Σ_i p_i log σ(-s(neg_i) - γ) with
    // p_i = softmax_i(α s(neg_i)) treated as constants. Accumulates free-space
    // gradients into grad (sized n_params) and returns the loss. Pass
    // frozen_weights to pin p_i (finite-difference checks).
    double adversarial_loss(const Triple& positive, std::span<const Triple> negatives,
                            double gamma, double alpha, std::vector<double>& grad,
                            const std::vector<double>* frozen_weights = nullptr) const;

    std::vector<double> adversarial_weights(std::span<const Triple> negatives,
                                            double alpha) const;

   private:
    struct Layout {
        std::size_t entities = 0, c_h = 0, c_t = 0, r_h = 0, r_t = 0, w_h = 0, w_t = 0;
        std::size_t total = 0;
    };

    void backprop_score(const Triple& t, double upstream, std::vector<double>& grad) const;

    TrainConfig cfg_;
    std::size_t n_entities_ = 0, n_relations_ = 0, dim_ = 0;
    Layout off_;
    std::vector<double> theta_;
    ModelConfig model_;

    std::size_t slope_slot(std::size_t relation) const {
        return cfg_.variant == Variant::EqSlopes ? 0 : relation;
    }
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double mrr = 0.0, hits1 = 0.0, hits3 = 0.0, hits10 = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    ModelConfig model;  // final epoch, no best-checkpoint rollback
    std::vector<EpochLog> log;
    std::string stop_reason;
};

using EvalCallback = std::function<RankingReport(const ModelConfig&)>;

// Mini-batched loss/gradient/Adam/projection epochs with every-epoch
// validation Hits@10 and patience-based early stopping. When no callback is
// given, validation uses the filtered ranking over the valid split.
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& cfg, EvalCallback evaluator = {});

// epoch,loss,mrr,hits1,hits3,hits10,seconds
void write_training_log_csv(const std::vector<EpochLog>& log, const std::string& path);

}  // namespace paragram
