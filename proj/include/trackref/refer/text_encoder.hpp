#pragma once

#include <map>
#include <string>
#include <vector>

#include <trackref/core/types.hpp>
#include <trackref/nn/tensor.hpp>

namespace trackref::refer {

// Frozen text encoder: one fixed embedding row per vocabulary word plus a
// shared out-of-vocabulary row. The seeded variant draws rows from a normal
// distribution; generators may instead supply purpose-built embeddings.
class TextEncoder {
public:
    TextEncoder(std::vector<std::string> vocab, nn::Tensor embedding);

    static TextEncoder seeded(std::vector<std::string> vocab, int dim, unsigned seed);

    // Sorted unique whitespace tokens over all description texts.
    static std::vector<std::string> build_vocab(const std::vector<DescriptionRecord>& descs);

    // token features [L, dim]
    nn::Tensor encode(const std::vector<std::string>& tokens) const;
    // mean over token features [dim]
    nn::Tensor encode_pooled(const std::vector<std::string>& tokens) const;

    const std::vector<std::string>& vocab() const { return vocab_; }
    int dim() const { return embedding_.cols(); }

private:
    std::vector<std::string> vocab_;
    std::map<std::string, int> index_;
    nn::Tensor embedding_;  // [|vocab| + 1, dim]; last row is OOV
};

}  // namespace trackref::refer
