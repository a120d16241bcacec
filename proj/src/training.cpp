#include "paragram/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace paragram {

using nlohmann::json;

namespace {

constexpr int kNegativeRetries = 1000;

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double stable_softplus(double x) {  // log(1 + e^x)
    return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double softplus_inverse(double y) { return std::log(std::expm1(y)); }

double clamped_atanh(double x) {
    const double limit = 1.0 - 1e-15;
    return std::atanh(std::clamp(x, -limit, limit));
}

}  // namespace

void TrainConfig::validate() const {
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
    if (margin < 0.0) throw ConfigError("margin must be >= 0");
    if (adversarial_temperature < 0.0) throw ConfigError("adversarial_temperature must be >= 0");
    if (negatives_per_positive < 1) throw ConfigError("negatives_per_positive must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
    if (patience_epochs < 0) throw ConfigError("patience_epochs must be >= 0");
    if (max_epochs > 0 && patience_epochs > max_epochs)
        throw ConfigError("patience_epochs must be <= max_epochs");
    if (min_hits10_gain < 0.0) throw ConfigError("min_hits10_gain must be >= 0");
    if (d_min < 0.0 || d_min > 1.0) throw ConfigError("d_min must lie in [0, 1]");
}

TrainConfig parse_train_config(const std::string& text) {
    TrainConfig cfg;
    auto assign = [&](const std::string& key, const json& value) {
        if (key == "dim")
            cfg.dim = value.get<std::size_t>();
        else if (key == "variant")
            cfg.variant = variant_from_name(value.get<std::string>());
        else if (key == "learning_rate")
            cfg.learning_rate = value.get<double>();
        else if (key == "margin")
            cfg.margin = value.get<double>();
        else if (key == "adversarial_temperature")
            cfg.adversarial_temperature = value.get<double>();
        else if (key == "negatives_per_positive")
            cfg.negatives_per_positive = value.get<int>();
        else if (key == "batch_size")
            cfg.batch_size = value.get<int>();
        else if (key == "max_epochs")
            cfg.max_epochs = value.get<int>();
        else if (key == "patience_epochs")
            cfg.patience_epochs = value.get<int>();
        else if (key == "min_hits10_gain")
            cfg.min_hits10_gain = value.get<double>();
        else if (key == "d_min")
            cfg.d_min = value.get<double>();
        else if (key == "seed")
            cfg.seed = value.get<std::uint64_t>();
        else
            throw ConfigError("unknown config key `" + key + "`");
    };

    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) assign(it.key(), it.value());
    } else {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#') continue;
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("expected key=value: `" + line + "`");
            std::string key = line.substr(start, eq - start);
            std::string value = line.substr(eq + 1);
            auto strip = [](std::string& s) {
                std::size_t a = s.find_first_not_of(" \t");
                std::size_t b = s.find_last_not_of(" \t");
                s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
            };
            strip(key);
            strip(value);
            if (key == "variant")
                assign(key, json(value));
            else
                assign(key, json::parse(value));
        }
    }
    cfg.validate();
    return cfg;
}

std::vector<Triple> sample_negatives(const KnowledgeGraph& kg, const Triple& positive, int n,
                                     Rng& rng) {
    if (n < 1) throw ConfigError("need at least one negative per positive");
    const std::uint32_t nE = static_cast<std::uint32_t>(kg.n_entities());
    std::uniform_int_distribution<std::uint32_t> pick_entity(0, nE - 1);
    std::uniform_int_distribution<int> pick_side(0, 1);
    std::vector<Triple> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        bool found = false;
        for (int attempt = 0; attempt < kNegativeRetries; ++attempt) {
            Triple cand = positive;
            if (pick_side(rng) == 0)
                cand.head = pick_entity(rng);
            else
                cand.tail = pick_entity(rng);
            if (kg.contains(cand, Split::Train)) continue;
            out.push_back(cand);
            found = true;
            break;
        }
        if (!found)
            throw Error("negative sampling exhausted for relation `" +
                        kg.relations[positive.relation] + "`");
    }
    return out;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               double learning_rate) {
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size())
        throw Error("adam_step shape mismatch");
    for (std::size_t i = 0; i < grads.size(); ++i)
        if (!std::isfinite(grads[i]))
            throw Error("non-finite gradient at parameter index " + std::to_string(i));
    ++state.step;
    const double b1 = state.beta1, b2 = state.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
        double m_hat = state.m[i] / bias1;
        double v_hat = state.v[i] / bias2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

TrainableModel::TrainableModel(const KnowledgeGraph& kg, const TrainConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    n_entities_ = kg.n_entities();
    n_relations_ = kg.n_relations();
    dim_ = cfg.dim;

    const std::size_t slope_rows = cfg.variant == Variant::EqSlopes ? 1 : n_relations_;
    off_.entities = 0;
    off_.c_h = off_.entities + n_entities_ * dim_;
    off_.c_t = off_.c_h + n_relations_ * dim_;
    off_.r_h = off_.c_t + n_relations_ * dim_;
    off_.r_t = off_.r_h + slope_rows * dim_;
    off_.w_h = off_.r_t + slope_rows * dim_;
    off_.w_t = off_.w_h + n_relations_ * dim_;
    off_.total = off_.w_t + n_relations_ * dim_;
    theta_.assign(off_.total, 0.0);

    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> u_entity(-1.0, 1.0);
    std::uniform_real_distribution<double> u_center(-0.5, 0.5);
    std::uniform_real_distribution<double> u_slope(-0.8, 0.8);
    std::uniform_real_distribution<double> u_width(softplus_inverse(0.2), softplus_inverse(0.6));
    for (std::size_t i = 0; i < n_entities_ * dim_; ++i) theta_[off_.entities + i] = u_entity(rng);
    for (std::size_t i = 0; i < n_relations_ * dim_; ++i) {
        theta_[off_.c_h + i] = u_center(rng);
        theta_[off_.c_t + i] = u_center(rng);
        theta_[off_.w_h + i] = u_width(rng);
        theta_[off_.w_t + i] = u_width(rng);
    }
    for (std::size_t i = 0; i < slope_rows * dim_; ++i) {
        theta_[off_.r_h + i] = u_slope(rng);
        theta_[off_.r_t + i] = u_slope(rng);
    }

    model_.dim = dim_;
    model_.variant = cfg.variant;
    model_.entity_ids = kg.entities;
    model_.relation_ids = kg.relations;
    model_.entities.assign(n_entities_ * dim_, 0.0);
    model_.relations.assign(n_relations_, RelationEmbedding{});
    for (auto& r : model_.relations) r.resize(dim_);
    refresh();
    project_constraints(cfg.d_min);
}

void TrainableModel::refresh() {
    for (std::size_t i = 0; i < n_entities_ * dim_; ++i)
        model_.entities[i] = std::tanh(theta_[off_.entities + i]);
    const bool no_center = cfg_.variant == Variant::NoCenter;
    const bool no_width = cfg_.variant == Variant::Functional;
    for (std::size_t r = 0; r < n_relations_; ++r) {
        RelationEmbedding& rel = model_.relations[r];
        const std::size_t row = r * dim_;
        const std::size_t srow = slope_slot(r) * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            rel.c_h[j] = no_center ? 0.0 : std::tanh(theta_[off_.c_h + row + j]);
            rel.c_t[j] = no_center ? 0.0 : std::tanh(theta_[off_.c_t + row + j]);
            rel.r_h[j] = std::tanh(theta_[off_.r_h + srow + j]);
            rel.r_t[j] = std::tanh(theta_[off_.r_t + srow + j]);
            rel.d_h[j] = no_width ? 0.0 : stable_softplus(theta_[off_.w_h + row + j]);
            rel.d_t[j] = no_width ? 0.0 : stable_softplus(theta_[off_.w_t + row + j]);
        }
    }
}

void TrainableModel::project_constraints(double d_min) {
    if (d_min <= 0.0) return;
    const std::size_t slope_rows = cfg_.variant == Variant::EqSlopes ? 1 : n_relations_;
    for (std::size_t slot = 0; slot < slope_rows; ++slot) {
        const std::size_t srow = slot * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            double rh = std::tanh(theta_[off_.r_h + srow + j]);
            double rt = std::tanh(theta_[off_.r_t + srow + j]);
            double product = rh * rt;
            if (1.0 - product >= d_min) continue;
            // product > 1 - d_min >= 0; shrink both slopes to hit the bound.
            double factor = std::sqrt((1.0 - d_min) / product);
            theta_[off_.r_h + srow + j] = clamped_atanh(rh * factor);
            theta_[off_.r_t + srow + j] = clamped_atanh(rt * factor);
        }
    }
    for (std::size_t r = 0; r < n_relations_; ++r) {
        const std::size_t srow = slope_slot(r) * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            model_.relations[r].r_h[j] = std::tanh(theta_[off_.r_h + srow + j]);
            model_.relations[r].r_t[j] = std::tanh(theta_[off_.r_t + srow + j]);
        }
    }
}

std::vector<double> TrainableModel::adversarial_weights(std::span<const Triple> negatives,
                                                        double alpha) const {
    if (negatives.empty()) throw ConfigError("adversarial weights need at least one negative");
    std::vector<double> logits(negatives.size());
    for (std::size_t i = 0; i < negatives.size(); ++i)
        logits[i] = alpha * score(model_, negatives[i]);
    double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& l : logits) {
        l = std::exp(l - max_logit);
        sum += l;
    }
    for (double& l : logits) l /= sum;
    return logits;
}

// Accumulates d(score)/d(free params) scaled by `upstream` into grad.
void TrainableModel::backprop_score(const Triple& t, double upstream,
                                    std::vector<double>& grad) const {
    const RelationEmbedding& rel = model_.relations[t.relation];
    auto eh = model_.entity(t.head);
    auto et = model_.entity(t.tail);
    const bool one_band = cfg_.variant == Variant::OneBand;
    const bool no_center = cfg_.variant == Variant::NoCenter;
    const bool no_width = cfg_.variant == Variant::Functional;

    const std::size_t components = one_band ? dim_ : 2 * dim_;
    std::vector<double> u(components), dist(components);
    double norm_sq = 0.0;
    for (std::size_t c = 0; c < components; ++c) {
        std::size_t j = c < dim_ ? c : c - dim_;
        double width = c < dim_ ? rel.d_h[j] : rel.d_t[j];
        u[c] = c < dim_ ? eh[j] - rel.c_h[j] - rel.r_t[j] * et[j]
                        : et[j] - rel.c_t[j] - rel.r_h[j] * eh[j];
        dist[c] = band_distance(std::fabs(u[c]), width);
        norm_sq += dist[c] * dist[c];
    }
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0) return;  // score at its maximum; zero subgradient

    const std::size_t row = static_cast<std::size_t>(t.relation) * dim_;
    const std::size_t srow = slope_slot(t.relation) * dim_;
    for (std::size_t c = 0; c < components; ++c) {
        std::size_t j = c < dim_ ? c : c - dim_;
        double width = c < dim_ ? rel.d_h[j] : rel.d_t[j];
        double tau = std::fabs(u[c]);
        double g_dist = upstream * (-dist[c] / norm);
        double w = 2.0 * width + 1.0;
        double g_tau, g_width;
        if (tau <= width) {
            g_tau = g_dist / w;
            g_width = g_dist * (-2.0 * tau / (w * w));
        } else {
            g_tau = g_dist * w;
            double dk_dw = 0.5 * ((w - 1.0 / w) + (w - 1.0) * (1.0 + 1.0 / (w * w)));
            g_width = g_dist * 2.0 * (tau - dk_dw);
        }
        double g_u = u[c] > 0.0 ? g_tau : (u[c] < 0.0 ? -g_tau : 0.0);

        if (c < dim_) {
            // u = e_h - c_h - r_t * e_t
            double jac_eh = 1.0 - eh[j] * eh[j];
            double jac_et = 1.0 - et[j] * et[j];
            grad[off_.entities + t.head * dim_ + j] += g_u * jac_eh;
            grad[off_.entities + t.tail * dim_ + j] += -g_u * rel.r_t[j] * jac_et;
            if (!no_center)
                grad[off_.c_h + row + j] += -g_u * (1.0 - rel.c_h[j] * rel.c_h[j]);
            grad[off_.r_t + srow + j] += -g_u * et[j] * (1.0 - rel.r_t[j] * rel.r_t[j]);
            if (!no_width)
                grad[off_.w_h + row + j] += g_width * stable_sigmoid(theta_[off_.w_h + row + j]);
        } else {
            // u = e_t - c_t - r_h * e_h
            double jac_eh = 1.0 - eh[j] * eh[j];
            double jac_et = 1.0 - et[j] * et[j];
            grad[off_.entities + t.tail * dim_ + j] += g_u * jac_et;
            grad[off_.entities + t.head * dim_ + j] += -g_u * rel.r_h[j] * jac_eh;
            if (!no_center)
                grad[off_.c_t + row + j] += -g_u * (1.0 - rel.c_t[j] * rel.c_t[j]);
            grad[off_.r_h + srow + j] += -g_u * eh[j] * (1.0 - rel.r_h[j] * rel.r_h[j]);
            if (!no_width)
                grad[off_.w_t + row + j] += g_width * stable_sigmoid(theta_[off_.w_t + row + j]);
        }
    }
}

double TrainableModel::adversarial_loss(const Triple& positive, std::span<const Triple> negatives,
                                        double gamma, double alpha, std::vector<double>& grad,
                                        const std::vector<double>* frozen_weights) const {
    if (negatives.empty()) throw ConfigError("adversarial loss needs at least one negative");
    if (grad.size() != theta_.size()) throw Error("gradient buffer size mismatch");

    double s_pos = score(model_, positive);
    std::vector<double> weights =
        frozen_weights ? *frozen_weights : adversarial_weights(negatives, alpha);

    double loss = stable_softplus(-(gamma + s_pos));
    backprop_score(positive, -stable_sigmoid(-(gamma + s_pos)), grad);
    for (std::size_t i = 0; i < negatives.size(); ++i) {
        double s_neg = score(model_, negatives[i]);
        loss += weights[i] * stable_softplus(s_neg + gamma);
        backprop_score(negatives[i], weights[i] * stable_sigmoid(s_neg + gamma), grad);
    }
    return loss;
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& cfg, EvalCallback evaluator) {
    cfg.validate();
    if (kg.n_entities() == 0 || kg.train.empty()) throw DataError("cannot train on an empty graph");

    TrainableModel tm(kg, cfg);
    TrainResult result;
    if (cfg.max_epochs == 0) {
        result.model = tm.model();
        result.stop_reason = "max_epochs reached";
        return result;
    }

    FilterIndex filter = FilterIndex::build(kg);
    EvalCallback eval = evaluator ? std::move(evaluator) : EvalCallback([&](const ModelConfig& m) {
        return evaluate(m, kg, filter, Split::Valid);
    });

    Rng rng(cfg.seed);
    AdamState adam(tm.n_params());
    std::vector<double> grad(tm.n_params(), 0.0);
    std::vector<std::size_t> order(kg.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    double best_hits10 = 0.0;
    int best_epoch = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);

        double total_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const Triple& pos = kg.train[order[i]];
                std::vector<Triple> negs =
                    sample_negatives(kg, pos, cfg.negatives_per_positive, rng);
                total_loss += tm.adversarial_loss(pos, negs, cfg.margin,
                                                  cfg.adversarial_temperature, grad);
            }
            double inv = 1.0 / static_cast<double>(stop - start);
            for (double& g : grad) g *= inv;
            adam_step(tm.theta(), grad, adam, cfg.learning_rate);
            tm.refresh();
            tm.project_constraints(cfg.d_min);
        }

        RankingReport report = eval(tm.model());
        double h10 = report.hits_at.count(10) ? report.hits_at.at(10) : 0.0;
        EpochLog row;
        row.epoch = epoch;
        row.loss = total_loss / static_cast<double>(order.size());
        row.mrr = report.mrr;
        row.hits1 = report.hits_at.count(1) ? report.hits_at.at(1) : 0.0;
        row.hits3 = report.hits_at.count(3) ? report.hits_at.at(3) : 0.0;
        row.hits10 = h10;
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(row);

        bool improved = epoch == 1 ||
                        (h10 > best_hits10 && h10 - best_hits10 >= cfg.min_hits10_gain * best_hits10);
        if (improved) {
            best_hits10 = h10;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= cfg.patience_epochs) {
            result.stop_reason = "no Hits@10 gain of " + std::to_string(cfg.min_hits10_gain) +
                                 " within " + std::to_string(cfg.patience_epochs) + " epochs";
            break;
        }
    }
    if (result.stop_reason.empty()) result.stop_reason = "max_epochs reached";
    result.model = tm.model();
    return result;
}

void write_training_log_csv(const std::vector<EpochLog>& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "epoch,loss,mrr,hits1,hits3,hits10,seconds\n";
    char line[256];
    for (const EpochLog& row : log) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", row.epoch,
                      row.loss, row.mrr, row.hits1, row.hits3, row.hits10, row.seconds);
        out << line;
    }
}

}  // namespace paragram
