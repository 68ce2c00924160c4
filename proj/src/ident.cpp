#include "gait/ident.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace gait {

namespace {

constexpr double kLnEps = 1e-8;
constexpr double kMaskScore = -1e30;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_grad(double x) {
    return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) +
           x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Row-wise layer norm with cached normalized activations and inverse stddev.
struct LnCache {
    Eigen::MatrixXd xhat;
    Eigen::VectorXd inv_std;
};

Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& g,
                           const Eigen::MatrixXd& b, LnCache& cache) {
    const int rows = static_cast<int>(x.rows()), cols = static_cast<int>(x.cols());
    cache.xhat.resize(rows, cols);
    cache.inv_std.resize(rows);
    Eigen::MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const double mean = x.row(i).mean();
        const double var = (x.row(i).array() - mean).square().mean();
        const double inv = 1.0 / std::sqrt(var + kLnEps);
        cache.inv_std(i) = inv;
        cache.xhat.row(i) = (x.row(i).array() - mean) * inv;
        out.row(i) = cache.xhat.row(i).cwiseProduct(g.row(0)) + b.row(0);
    }
    return out;
}

Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy, const Eigen::MatrixXd& g,
                                    const LnCache& cache, Eigen::MatrixXd& dg,
                                    Eigen::MatrixXd& db) {
    const int rows = static_cast<int>(dy.rows()), cols = static_cast<int>(dy.cols());
    Eigen::MatrixXd dx(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const Eigen::RowVectorXd dxhat = dy.row(i).cwiseProduct(g.row(0));
        const double m1 = dxhat.mean();
        const double m2 = dxhat.cwiseProduct(cache.xhat.row(i)).mean();
        dx.row(i) = cache.inv_std(i) *
                    (dxhat.array() - m1 - cache.xhat.row(i).array() * m2).matrix();
        dg.row(0) += dy.row(i).cwiseProduct(cache.xhat.row(i));
        db.row(0) += dy.row(i);
    }
    return dx;
}

// Masked row softmax; a fully masked row yields all-zero weights.
Eigen::MatrixXd masked_softmax(const Eigen::MatrixXd& scores, const std::vector<uint8_t>& mask) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(scores.rows(), scores.cols());
    for (int i = 0; i < scores.rows(); ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < scores.cols(); ++j)
            if (mask[j]) row_max = std::max(row_max, scores(i, j));
        if (!std::isfinite(row_max)) continue;
        double sum = 0.0;
        for (int j = 0; j < scores.cols(); ++j) {
            if (!mask[j]) continue;
            w(i, j) = std::exp(scores(i, j) - row_max);
            sum += w(i, j);
        }
        if (sum > 0.0) w.row(i) /= sum;
    }
    return w;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

}  // namespace

std::vector<SequenceWindow> segment(const GaitSequence& seq, int window) {
    if (seq.features.rows() == 0)
        throw ArgumentError("segment: empty sequence");
    if (seq.features.cols() != kIdentFeatureDim)
        throw ArgumentError("segment: expected " + std::to_string(kIdentFeatureDim) + " features");
    if (window < 1)
        throw ArgumentError("segment: window must be >= 1");

    std::vector<SequenceWindow> out;
    const int n = static_cast<int>(seq.features.rows());
    for (int start = 0; start < n; start += window) {
        SequenceWindow w;
        const int len = std::min(window, n - start);
        w.x = Eigen::MatrixXd::Zero(window, kIdentFeatureDim);
        w.x.topRows(len) = seq.features.middleRows(start, len);
        w.mask.assign(window, 0);
        std::fill(w.mask.begin(), w.mask.begin() + len, 1);
        w.label = seq.label;
        out.push_back(std::move(w));
    }
    return out;
}

void IdentConfig::validate() const {
    if (d_model < 1 || n_heads < 1 || n_layers < 1 || d_ff < 1 || window < 1 || n_classes < 2)
        throw ArgumentError("ident: invalid model dimensions");
    if (d_model % n_heads != 0)
        throw ArgumentError("ident: d_model must be divisible by n_heads");
    if (dropout < 0.0 || dropout >= 1.0)
        throw ArgumentError("ident: dropout must be in [0, 1)");
}

IdentModel::IdentModel(const IdentConfig& cfg, uint64_t seed) : cfg_(cfg) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> init(0.0, 0.02);

    auto add = [&](const std::string& name, int rows, int cols, bool random) {
        Param p;
        p.name = name;
        p.value = Eigen::MatrixXd::Zero(rows, cols);
        if (random)
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) p.value(i, j) = init(rng);
        p.grad = Eigen::MatrixXd::Zero(rows, cols);
        params_.push_back(std::move(p));
    };

    add("embed_w", kIdentFeatureDim, cfg.d_model, true);
    add("embed_b", 1, cfg.d_model, false);
    add("pos_enc", cfg.window, cfg.d_model, false);
    // sinusoidal initialization for the (trainable) positional encodings
    Eigen::MatrixXd& pe = params_[2].value;
    for (int t = 0; t < cfg.window; ++t)
        for (int j = 0; j < cfg.d_model; ++j) {
            const double rate = std::pow(10000.0, -2.0 * (j / 2) / cfg.d_model);
            pe(t, j) = (j % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
        }
    pe *= 0.1;

    for (int l = 0; l < cfg.n_layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        add(p + "wq", cfg.d_model, cfg.d_model, true);
        add(p + "bq", 1, cfg.d_model, false);
        add(p + "wk", cfg.d_model, cfg.d_model, true);
        add(p + "bk", 1, cfg.d_model, false);
        add(p + "wv", cfg.d_model, cfg.d_model, true);
        add(p + "bv", 1, cfg.d_model, false);
        add(p + "wo", cfg.d_model, cfg.d_model, true);
        add(p + "bo", 1, cfg.d_model, false);
        add(p + "ln1_g", 1, cfg.d_model, false);
        add(p + "ln1_b", 1, cfg.d_model, false);
        add(p + "ff_w1", cfg.d_model, cfg.d_ff, true);
        add(p + "ff_b1", 1, cfg.d_ff, false);
        add(p + "ff_w2", cfg.d_ff, cfg.d_model, true);
        add(p + "ff_b2", 1, cfg.d_model, false);
        add(p + "ln2_g", 1, cfg.d_model, false);
        add(p + "ln2_b", 1, cfg.d_model, false);
        params_[params_.size() - 8].value.setOnes();  // ln1_g
        params_[params_.size() - 2].value.setOnes();  // ln2_g
    }
    add("head_w", cfg.d_model, cfg.n_classes, true);
    add("head_b", 1, cfg.n_classes, false);
}

void IdentModel::zero_grad() {
    for (Param& p : params_) p.grad.setZero();
}

namespace {

// Everything the backward pass needs from one window's forward pass.
struct LayerCache {
    Eigen::MatrixXd h_in, q, k, v, att_concat, o;
    std::vector<Eigen::MatrixXd> weights;  // per head, T x T
    Eigen::MatrixXd drop_o;                // dropout mask (scaled), empty if off
    LnCache ln1;
    Eigen::MatrixXd h1, ff_u, ff_g, ff_out, drop_ff;
    LnCache ln2;
};

struct ForwardCache {
    Eigen::MatrixXd h0;
    std::vector<LayerCache> layers;
    Eigen::MatrixXd h_final;
    Eigen::VectorXd pooled;
    Eigen::VectorXd probs;
    int n_real = 0;
};

}  // namespace

// Shared forward used by both the public eval path and training.
static void run_forward(const IdentConfig& cfg, const std::vector<Param>& params,
                        const SequenceWindow& w, bool train, double dropout,
                        std::mt19937_64* rng, ForwardCache& fc) {
    if (w.x.rows() != cfg.window || w.x.cols() != kIdentFeatureDim)
        throw ArgumentError("forward: window shape mismatch");
    if (static_cast<int>(w.mask.size()) != cfg.window)
        throw ArgumentError("forward: mask length mismatch");

    const int T = cfg.window, d = cfg.d_model, heads = cfg.n_heads, dk = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    size_t pi = 0;
    const Eigen::MatrixXd& embed_w = params[pi++].value;
    const Eigen::MatrixXd& embed_b = params[pi++].value;
    const Eigen::MatrixXd& pos_enc = params[pi++].value;

    auto make_dropout = [&](int rows, int cols) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Ones(rows, cols);
        if (train && dropout > 0.0 && rng) {
            std::bernoulli_distribution keep(1.0 - dropout);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    m(i, j) = keep(*rng) ? 1.0 / (1.0 - dropout) : 0.0;
        }
        return m;
    };

    Eigen::MatrixXd h = (w.x * embed_w).rowwise() + embed_b.row(0);
    h += pos_enc;
    fc.h0 = h;
    fc.layers.resize(cfg.n_layers);

    for (int l = 0; l < cfg.n_layers; ++l) {
        LayerCache& lc = fc.layers[l];
        const Eigen::MatrixXd& wq = params[pi++].value;
        const Eigen::MatrixXd& bq = params[pi++].value;
        const Eigen::MatrixXd& wk = params[pi++].value;
        const Eigen::MatrixXd& bk = params[pi++].value;
        const Eigen::MatrixXd& wv = params[pi++].value;
        const Eigen::MatrixXd& bv = params[pi++].value;
        const Eigen::MatrixXd& wo = params[pi++].value;
        const Eigen::MatrixXd& bo = params[pi++].value;
        const Eigen::MatrixXd& ln1_g = params[pi++].value;
        const Eigen::MatrixXd& ln1_b = params[pi++].value;
        const Eigen::MatrixXd& ff_w1 = params[pi++].value;
        const Eigen::MatrixXd& ff_b1 = params[pi++].value;
        const Eigen::MatrixXd& ff_w2 = params[pi++].value;
        const Eigen::MatrixXd& ff_b2 = params[pi++].value;
        const Eigen::MatrixXd& ln2_g = params[pi++].value;
        const Eigen::MatrixXd& ln2_b = params[pi++].value;

        lc.h_in = h;
        lc.q = (h * wq).rowwise() + bq.row(0);
        lc.k = (h * wk).rowwise() + bk.row(0);
        lc.v = (h * wv).rowwise() + bv.row(0);

        lc.att_concat.resize(T, d);
        lc.weights.resize(heads);
        for (int hd = 0; hd < heads; ++hd) {
            const auto qh = lc.q.middleCols(hd * dk, dk);
            const auto kh = lc.k.middleCols(hd * dk, dk);
            const auto vh = lc.v.middleCols(hd * dk, dk);
            Eigen::MatrixXd scores = qh * kh.transpose() * scale;
            lc.weights[hd] = masked_softmax(scores, w.mask);
            lc.att_concat.middleCols(hd * dk, dk) = lc.weights[hd] * vh;
        }
        lc.o = (lc.att_concat * wo).rowwise() + bo.row(0);
        lc.drop_o = make_dropout(T, d);
        lc.o = lc.o.cwiseProduct(lc.drop_o);
        lc.h1 = layer_norm(lc.h_in + lc.o, ln1_g, ln1_b, lc.ln1);

        lc.ff_u = (lc.h1 * ff_w1).rowwise() + ff_b1.row(0);
        lc.ff_g = lc.ff_u.unaryExpr([](double x) { return gelu(x); });
        lc.ff_out = (lc.ff_g * ff_w2).rowwise() + ff_b2.row(0);
        lc.drop_ff = make_dropout(T, d);
        lc.ff_out = lc.ff_out.cwiseProduct(lc.drop_ff);
        h = layer_norm(lc.h1 + lc.ff_out, ln2_g, ln2_b, lc.ln2);
    }
    fc.h_final = h;

    fc.n_real = static_cast<int>(std::count(w.mask.begin(), w.mask.end(), 1));
    fc.pooled = Eigen::VectorXd::Zero(d);
    if (fc.n_real > 0) {
        for (int t = 0; t < T; ++t)
            if (w.mask[t]) fc.pooled += h.row(t).transpose();
        fc.pooled /= static_cast<double>(fc.n_real);
    }

    const Eigen::MatrixXd& head_w = params[pi++].value;
    const Eigen::MatrixXd& head_b = params[pi++].value;
    fc.probs = softmax(head_w.transpose() * fc.pooled + head_b.row(0).transpose());
}

Eigen::VectorXd IdentModel::forward(const SequenceWindow& w) const {
    ForwardCache fc;
    run_forward(cfg_, params_, w, false, 0.0, nullptr, fc);
    return fc.probs;
}

double IdentModel::loss_and_grad(const std::vector<SequenceWindow>& batch, bool train,
                                 std::mt19937_64* rng) {
    if (batch.empty())
        throw ArgumentError("loss_and_grad: empty batch");

    const int T = cfg_.window, d = cfg_.d_model, heads = cfg_.n_heads, dk = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    double total_loss = 0.0;

    for (const SequenceWindow& w : batch) {
        if (w.label < 0 || w.label >= cfg_.n_classes)
            throw ArgumentError("loss_and_grad: label out of range");
        ForwardCache fc;
        run_forward(cfg_, params_, w, train, cfg_.dropout, rng, fc);
        total_loss += -std::log(std::max(fc.probs(w.label), 1e-300));

        // ---- backward ----
        const size_t head_w_i = params_.size() - 2;
        const size_t head_b_i = params_.size() - 1;

        Eigen::VectorXd dlogits = fc.probs;
        dlogits(w.label) -= 1.0;
        dlogits *= inv_batch;

        params_[head_w_i].grad += fc.pooled * dlogits.transpose();
        params_[head_b_i].grad += dlogits.transpose();
        const Eigen::VectorXd dpooled = params_[head_w_i].value * dlogits;

        Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(T, d);
        if (fc.n_real > 0) {
            for (int t = 0; t < T; ++t)
                if (w.mask[t]) dh.row(t) = dpooled.transpose() / static_cast<double>(fc.n_real);
        }

        for (int l = cfg_.n_layers - 1; l >= 0; --l) {
            const size_t base = 3 + static_cast<size_t>(l) * 16;
            LayerCache& lc = fc.layers[l];
            Eigen::MatrixXd& wq = params_[base + 0].value;
            Eigen::MatrixXd& wk = params_[base + 2].value;
            Eigen::MatrixXd& wv = params_[base + 4].value;
            Eigen::MatrixXd& wo = params_[base + 6].value;
            Eigen::MatrixXd& ln1_g = params_[base + 8].value;
            Eigen::MatrixXd& ff_w1 = params_[base + 10].value;
            Eigen::MatrixXd& ff_w2 = params_[base + 12].value;
            Eigen::MatrixXd& ln2_g = params_[base + 14].value;

            // LN2
            Eigen::MatrixXd dsum2 = layer_norm_backward(dh, ln2_g, lc.ln2,
                                                        params_[base + 14].grad,
                                                        params_[base + 15].grad);
            // feed-forward branch
            Eigen::MatrixXd dff_out = dsum2.cwiseProduct(lc.drop_ff);
            params_[base + 12].grad += lc.ff_g.transpose() * dff_out;
            params_[base + 13].grad += dff_out.colwise().sum();
            Eigen::MatrixXd dg = dff_out * ff_w2.transpose();
            Eigen::MatrixXd du = dg.cwiseProduct(lc.ff_u.unaryExpr(
                [](double x) { return gelu_grad(x); }));
            params_[base + 10].grad += lc.h1.transpose() * du;
            params_[base + 11].grad += du.colwise().sum();
            Eigen::MatrixXd dh1 = dsum2 + du * ff_w1.transpose();

            // LN1
            Eigen::MatrixXd dsum1 = layer_norm_backward(dh1, ln1_g, lc.ln1,
                                                        params_[base + 8].grad,
                                                        params_[base + 9].grad);
            // attention branch
            Eigen::MatrixXd do_ = dsum1.cwiseProduct(lc.drop_o);
            params_[base + 6].grad += lc.att_concat.transpose() * do_;
            params_[base + 7].grad += do_.colwise().sum();
            Eigen::MatrixXd datt = do_ * wo.transpose();

            Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(T, d);
            Eigen::MatrixXd dkm = Eigen::MatrixXd::Zero(T, d);
            Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(T, d);
            for (int hd = 0; hd < heads; ++hd) {
                const auto qh = lc.q.middleCols(hd * dk, dk);
                const auto kh = lc.k.middleCols(hd * dk, dk);
                const auto vh = lc.v.middleCols(hd * dk, dk);
                const Eigen::MatrixXd& wgt = lc.weights[hd];
                const auto dah = datt.middleCols(hd * dk, dk);

                dv.middleCols(hd * dk, dk) = wgt.transpose() * dah;
                Eigen::MatrixXd dw = dah * vh.transpose();
                // softmax rows: dS = W .* (dW - rowsum(dW .* W))
                Eigen::MatrixXd ds(T, T);
                for (int i = 0; i < T; ++i) {
                    const double dot = dw.row(i).cwiseProduct(wgt.row(i)).sum();
                    ds.row(i) = wgt.row(i).cwiseProduct((dw.row(i).array() - dot).matrix());
                }
                ds *= scale;
                dq.middleCols(hd * dk, dk) = ds * kh;
                dkm.middleCols(hd * dk, dk) = ds.transpose() * qh;
            }
            params_[base + 0].grad += lc.h_in.transpose() * dq;
            params_[base + 1].grad += dq.colwise().sum();
            params_[base + 2].grad += lc.h_in.transpose() * dkm;
            params_[base + 3].grad += dkm.colwise().sum();
            params_[base + 4].grad += lc.h_in.transpose() * dv;
            params_[base + 5].grad += dv.colwise().sum();

            dh = dsum1 + dq * wq.transpose() + dkm * wk.transpose() + dv * wv.transpose();
        }

        // embedding
        params_[2].grad += dh;                                // pos_enc
        params_[0].grad += w.x.transpose() * dh;              // embed_w
        params_[1].grad += dh.colwise().sum();                // embed_b
    }
    return total_loss * inv_batch;
}

double grad_check(IdentModel& model, const std::vector<SequenceWindow>& batch,
                  double epsilon, uint64_t seed, int n_coords) {
    model.zero_grad();
    model.loss_and_grad(batch, false, nullptr);

    auto loss_only = [&]() {
        double loss = 0.0;
        for (const SequenceWindow& w : batch) {
            const Eigen::VectorXd probs = model.forward(w);
            loss += -std::log(std::max(probs(w.label), 1e-300));
        }
        return loss / batch.size();
    };

    std::mt19937_64 rng(seed);
    const int per_tensor = std::max(
        2, n_coords / static_cast<int>(model.params().size()) + 1);

    double max_rel = 0.0;
    for (Param& p : model.params()) {
        const int sz = static_cast<int>(p.value.size());
        std::uniform_int_distribution<int> pick(0, sz - 1);
        for (int c = 0; c < std::min(per_tensor, sz); ++c) {
            const int idx = pick(rng);
            const double saved = p.value.data()[idx];
            p.value.data()[idx] = saved + epsilon;
            const double lp = loss_only();
            p.value.data()[idx] = saved - epsilon;
            const double lm = loss_only();
            p.value.data()[idx] = saved;
            const double numeric = (lp - lm) / (2.0 * epsilon);
            const double analytic = p.grad.data()[idx];
            // The floor keeps central-difference rounding noise (~1e-12 in
            // the loss) from dominating coordinates whose true gradient is 0.
            const double denom = std::max({1e-6, std::abs(numeric), std::abs(analytic)});
            max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
        }
    }
    return max_rel;
}

namespace {

struct AdamState {
    std::vector<Eigen::MatrixXd> m, v;
    int t = 0;
};

void adam_step(std::vector<Param>& params, AdamState& state, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (state.m.empty()) {
        for (const Param& p : params) {
            state.m.push_back(Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols()));
            state.v.push_back(Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols()));
        }
    }
    ++state.t;
    const double corr1 = 1.0 - std::pow(b1, state.t);
    const double corr2 = 1.0 - std::pow(b2, state.t);
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * params[i].grad;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * params[i].grad.cwiseProduct(params[i].grad);
        params[i].value -= lr * (state.m[i] / corr1).cwiseQuotient(
            ((state.v[i] / corr2).cwiseSqrt().array() + eps).matrix());
    }
}

}  // namespace

KFoldResult train_kfold(const std::vector<GaitSequence>& dataset, const TrainConfig& cfg) {
    if (cfg.folds < 2)
        throw ArgumentError("train_kfold: need at least 2 folds");

    // stratified fold assignment per label
    std::map<int, std::vector<int>> by_label;
    for (size_t i = 0; i < dataset.size(); ++i)
        by_label[dataset[i].label].push_back(static_cast<int>(i));
    if (by_label.size() < 2)
        throw ArgumentError("train_kfold: need at least 2 labels");

    std::mt19937_64 rng(cfg.seed);
    std::vector<int> fold_of(dataset.size(), 0);
    for (auto& [label, ids] : by_label) {
        if (static_cast<int>(ids.size()) < cfg.folds)
            throw ArgumentError("train_kfold: label " + std::to_string(label) +
                                " has fewer sequences than folds");
        std::shuffle(ids.begin(), ids.end(), rng);
        for (size_t i = 0; i < ids.size(); ++i)
            fold_of[ids[i]] = static_cast<int>(i % cfg.folds);
    }

    IdentConfig model_cfg = cfg.model;
    model_cfg.window = cfg.window;
    model_cfg.dropout = cfg.dropout;
    model_cfg.n_classes = static_cast<int>(by_label.rbegin()->first) + 1;

    KFoldResult result;
    result.confusion = Eigen::MatrixXi::Zero(model_cfg.n_classes, model_cfg.n_classes);

    for (int fold = 0; fold < cfg.folds; ++fold) {
        // z-score stats from training folds only
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(kIdentFeatureDim);
        Eigen::VectorXd sq = Eigen::VectorXd::Zero(kIdentFeatureDim);
        long count = 0;
        for (size_t i = 0; i < dataset.size(); ++i) {
            if (fold_of[i] == fold) continue;
            for (int r = 0; r < dataset[i].features.rows(); ++r) {
                mean += dataset[i].features.row(r).transpose();
                sq += dataset[i].features.row(r).transpose().cwiseAbs2();
                ++count;
            }
        }
        mean /= static_cast<double>(count);
        Eigen::VectorXd sd = (sq / count - mean.cwiseAbs2()).cwiseMax(1e-12).cwiseSqrt();

        auto standardized_windows = [&](int which_fold, bool in_fold) {
            std::vector<SequenceWindow> windows;
            for (size_t i = 0; i < dataset.size(); ++i) {
                if ((fold_of[i] == which_fold) != in_fold) continue;
                GaitSequence z = dataset[i];
                for (int r = 0; r < z.features.rows(); ++r)
                    z.features.row(r) =
                        (z.features.row(r).transpose() - mean).cwiseQuotient(sd).transpose();
                for (SequenceWindow& w : segment(z, cfg.window)) {
                    w.sequence_id = static_cast<int>(i);
                    windows.push_back(std::move(w));
                }
            }
            return windows;
        };

        std::vector<SequenceWindow> train = standardized_windows(fold, false);
        const std::vector<SequenceWindow> val = standardized_windows(fold, true);

        IdentModel model(model_cfg, cfg.seed * 131 + static_cast<uint64_t>(fold));
        AdamState adam;
        std::mt19937_64 train_rng(cfg.seed * 977 + static_cast<uint64_t>(fold));

        std::vector<int> order(train.size());
        std::iota(order.begin(), order.end(), 0);
        constexpr size_t kBatch = 8;
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), train_rng);
            for (size_t b = 0; b < order.size(); b += kBatch) {
                std::vector<SequenceWindow> batch;
                for (size_t i = b; i < std::min(order.size(), b + kBatch); ++i)
                    batch.push_back(train[order[i]]);
                model.zero_grad();
                model.loss_and_grad(batch, true, &train_rng);
                adam_step(model.params(), adam, cfg.learning_rate);
            }
        }

        int correct = 0;
        for (const SequenceWindow& w : val) {
            Eigen::Index pred;
            model.forward(w).maxCoeff(&pred);
            result.confusion(w.label, static_cast<int>(pred)) += 1;
            if (static_cast<int>(pred) == w.label) ++correct;
        }
        result.fold_accuracy.push_back(val.empty() ? 0.0
                                                   : static_cast<double>(correct) / val.size());
    }

    result.mean_accuracy =
        std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) /
        result.fold_accuracy.size();
    return result;
}

void IdentModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError(path, "cannot write checkpoint");
    const char magic[4] = {'G', 'K', 'I', 'D'};
    out.write(magic, 4);
    const uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const int32_t dims[7] = {cfg_.d_model, cfg_.n_heads, cfg_.n_layers, cfg_.d_ff,
                             cfg_.window, cfg_.n_classes, static_cast<int32_t>(params_.size())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(&cfg_.dropout), sizeof(double));
    for (const Param& p : params_) {
        const int32_t shape[2] = {static_cast<int32_t>(p.value.rows()),
                                  static_cast<int32_t>(p.value.cols())};
        out.write(reinterpret_cast<const char*>(shape), sizeof(shape));
        out.write(reinterpret_cast<const char*>(p.value.data()),
                  static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    }
}

IdentModel IdentModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(path, "cannot open checkpoint");
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "GKID")
        throw ParseError(path, "not a gaitkit checkpoint");
    uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != 1)
        throw ParseError(path, "unsupported checkpoint version " + std::to_string(version));
    int32_t dims[7];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    IdentConfig cfg;
    cfg.d_model = dims[0];
    cfg.n_heads = dims[1];
    cfg.n_layers = dims[2];
    cfg.d_ff = dims[3];
    cfg.window = dims[4];
    cfg.n_classes = dims[5];
    in.read(reinterpret_cast<char*>(&cfg.dropout), sizeof(double));

    IdentModel model(cfg, 0);
    if (static_cast<int32_t>(model.params_.size()) != dims[6])
        throw ParseError(path, "parameter count mismatch");
    for (Param& p : model.params_) {
        int32_t shape[2];
        in.read(reinterpret_cast<char*>(shape), sizeof(shape));
        if (shape[0] != p.value.rows() || shape[1] != p.value.cols())
            throw ParseError(path, "shape mismatch for " + p.name);
        in.read(reinterpret_cast<char*>(p.value.data()),
                static_cast<std::streamsize>(p.value.size() * sizeof(double)));
        if (!in)
            throw ParseError(path, "truncated checkpoint");
    }
    return model;
}

}  // namespace gait
