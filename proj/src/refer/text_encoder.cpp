#include <trackref/refer/text_encoder.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <trackref/core/errors.hpp>

namespace trackref::refer {

TextEncoder::TextEncoder(std::vector<std::string> vocab, nn::Tensor embedding)
    : vocab_(std::move(vocab)), embedding_(std::move(embedding)) {
    if (embedding_.rank() != 2 || embedding_.rows() != static_cast<int>(vocab_.size()) + 1)
        throw DataError("text encoder embedding must have |vocab| + 1 rows");
    for (size_t i = 0; i < vocab_.size(); ++i) index_[vocab_[i]] = static_cast<int>(i);
}

TextEncoder TextEncoder::seeded(std::vector<std::string> vocab, int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
    nn::Tensor emb({static_cast<int>(vocab.size()) + 1, dim});
    for (double& v : emb.data()) v = dist(rng);
    return TextEncoder(std::move(vocab), std::move(emb));
}

std::vector<std::string> TextEncoder::build_vocab(const std::vector<DescriptionRecord>& descs) {
    std::set<std::string> words;
    for (const DescriptionRecord& d : descs)
        for (const std::string& tok : d.tokens()) words.insert(tok);
    return {words.begin(), words.end()};
}

nn::Tensor TextEncoder::encode(const std::vector<std::string>& tokens) const {
    if (tokens.empty())
        throw DataError("text encoder: empty token sequence");
    nn::Tensor out({static_cast<int>(tokens.size()), dim()});
    for (size_t i = 0; i < tokens.size(); ++i) {
        auto it = index_.find(tokens[i]);
        const int row = it != index_.end() ? it->second : embedding_.rows() - 1;
        for (int c = 0; c < dim(); ++c) out.at(static_cast<int>(i), c) = embedding_.at(row, c);
    }
    return out;
}

nn::Tensor TextEncoder::encode_pooled(const std::vector<std::string>& tokens) const {
    nn::Tensor tok = encode(tokens);
    nn::Tensor out({dim()});
    for (int r = 0; r < tok.rows(); ++r)
        for (int c = 0; c < dim(); ++c) out[c] += tok.at(r, c) / tok.rows();
    return out;
}

}  // namespace trackref::refer
