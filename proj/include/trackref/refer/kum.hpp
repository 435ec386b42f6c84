#pragma once

#include <optional>
#include <random>
#include <string>

#include <trackref/nn/layers.hpp>
#include <trackref/refer/features.hpp>

namespace trackref::refer {

enum class KumVariant { Baseline, CascadeAttention, CrossCorrelation, TextFirst };

KumVariant kum_variant_from_name(const std::string& name);
std::string kum_variant_name(KumVariant v);

struct KumConfig {
    KumVariant variant = KumVariant::CascadeAttention;
    int c_v = 64;
    int c_t = 32;
    int c = 32;
    int head_dim = 0;  // 0 = c_v
    int kernels = 4;   // dynamic kernel bank size for cross correlation
    double gamma_init = 10.0;
};

// Parameters of the two-stream scorer. The textual head is frozen during
// training; everything else, including the logit scale, is learnable.
struct KumParams {
    KumConfig cfg;
    nn::AttentionParams visual_attn;           // local queries global
    nn::AttentionParams text_attn;             // cascade stage 2
    nn::DenseLayer text_to_cv;                 // c -> c_v single text key
    nn::DenseLayer kernel_hidden, kernel_out;  // c -> c -> kernels * c_v
    nn::DenseLayer gate_global, gate_local;    // c -> c_v sigmoid gates
    nn::DenseLayer text_head1, text_head2;     // c_t -> c -> c (frozen)
    nn::DenseLayer vis_head1, vis_head2;       // c_v -> c -> c
    nn::Tensor gamma;                          // logit scale, scalar

    static KumParams init(const KumConfig& cfg, std::mt19937& rng);

    void save(const std::filesystem::path& file, const std::vector<std::string>& vocab,
              unsigned text_seed) const;
    struct Loaded {
        KumParams params;
        std::vector<std::string> vocab;
        unsigned text_seed = 0;
    };
    static Loaded load(const std::filesystem::path& file);
};

struct BoundKum {
    KumConfig cfg;
    nn::BoundAttention visual_attn, text_attn;
    nn::BoundDense text_to_cv, kernel_hidden, kernel_out, gate_global, gate_local;
    nn::BoundDense text_head1, text_head2;
    nn::BoundDense vis_head1, vis_head2;
    nn::Var gamma;
};

// Binds parameters onto the tape. The textual head is always bound frozen;
// with trainable = false everything is frozen (scoring path).
BoundKum bind_kum(nn::Binder& b, KumParams& p, bool trainable);

// mean over tokens, then the two-layer textual head: [L, C_t] -> [C]
nn::Var textual_head(nn::Tape& t, const BoundKum& kum, nn::Var token_features);

// One window of per-frame visual features bound as tape leaves.
struct KumInput {
    std::vector<nn::Var> global_frames;  // each [S_g, C_v]
    std::vector<nn::Var> local_frames;   // each [S_l, C_v]
};

KumInput make_kum_input(nn::Tape& t, const FeatureMap& global, const FeatureMap& local);

// The unification module: [T, C_v] from the configured variant. The
// baseline ignores the text; the guided variants require it.
nn::Var kum_forward(nn::Tape& t, const BoundKum& kum, const KumInput& in,
                    std::optional<nn::Var> text_pooled);

// Temporal mean then the two-layer visual head: [T, C_v] -> [C]
nn::Var visual_feature(nn::Tape& t, const BoundKum& kum, nn::Var f_uni);

// s = sigmoid(gamma * cosine(f_v, f_t)) in (0, 1)
nn::Var logit_head(nn::Tape& t, nn::Var f_v, nn::Var f_t, nn::Var gamma);

// Focal loss with p clamped to [1e-7, 1 - 1e-7].
nn::Var focal_loss(nn::Tape& t, nn::Var score, bool label, double alpha = 0.25,
                   double gamma_f = 2.0);

}  // namespace trackref::refer
