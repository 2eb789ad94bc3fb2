#pragma once

#include <cstdint>

#include "types.hpp"

namespace splitgauge {

// Configuration of the built-in deterministic reference embedder: per-channel
// patch means on a pooled_h x pooled_w grid, a seeded Gaussian random
// projection to projection_dim, then elementwise tanh. A dependency-free
// stand-in for a pretrained feature extractor; real Inception activations
// enter through io::load_features instead.
struct EmbedderConfig {
    uint32_t pooled_h = 8;
    uint32_t pooled_w = 8;
    uint32_t projection_dim = 64;
    uint64_t seed = 0;
};

// Pure function of (pixels, cfg): labels never enter, identical inputs give
// identical rows, and every output entry lies in (-1, 1).
FeatureMatrix embed_reference(const Dataset& data, const EmbedderConfig& cfg,
                              int threads = 1);

std::string embedder_id(const EmbedderConfig& cfg);

}  // namespace splitgauge
