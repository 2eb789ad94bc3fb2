#include "embedder.hpp"

#include <cmath>
#include <thread>

#include "error.hpp"
#include "prng.hpp"

namespace splitgauge {

std::string embedder_id(const EmbedderConfig& cfg) {
    return "reference-g" + std::to_string(cfg.pooled_h) + "x" + std::to_string(cfg.pooled_w) +
           "-d" + std::to_string(cfg.projection_dim) + "-s" + std::to_string(cfg.seed);
}

namespace {

void validate_config(const Dataset& data, const EmbedderConfig& cfg) {
    if (cfg.pooled_h == 0 || cfg.pooled_w == 0)
        raise(ErrorKind::validation, "embedder: pooled grid must be positive");
    if (cfg.projection_dim == 0)
        raise(ErrorKind::validation, "embedder: projection_dim must be positive");
    uint64_t pooled_inputs =
        uint64_t{cfg.pooled_h} * cfg.pooled_w * data.channels;
    if (cfg.projection_dim > pooled_inputs * 4)
        raise(ErrorKind::validation,
              "embedder: projection_dim " + std::to_string(cfg.projection_dim) +
                  " exceeds 4x pooled inputs (" + std::to_string(pooled_inputs) + ")");
}

// Patch means over the grid after padding H and W up to multiples of the
// patch size by edge replication. Pixels are scaled to [0, 1].
void pool_sample(const Dataset& data, size_t n, const EmbedderConfig& cfg,
                 Eigen::VectorXd& out) {
    const uint32_t gh = cfg.pooled_h, gw = cfg.pooled_w;
    const uint32_t ph = (data.height + gh - 1) / gh;
    const uint32_t pw = (data.width + gw - 1) / gw;
    const uint8_t* px = data.sample(n);
    const double norm = 1.0 / (255.0 * ph * pw);
    for (uint32_t gi = 0; gi < gh; ++gi)
        for (uint32_t gj = 0; gj < gw; ++gj)
            for (uint32_t ch = 0; ch < data.channels; ++ch) {
                double acc = 0.0;
                for (uint32_t r = 0; r < ph; ++r) {
                    uint32_t row = std::min(gi * ph + r, data.height - 1);
                    for (uint32_t c = 0; c < pw; ++c) {
                        uint32_t col = std::min(gj * pw + c, data.width - 1);
                        acc += px[(static_cast<size_t>(row) * data.width + col) *
                                      data.channels +
                                  ch];
                    }
                }
                out[(static_cast<size_t>(gi) * gw + gj) * data.channels + ch] = acc * norm;
            }
}

}  // namespace

FeatureMatrix embed_reference(const Dataset& data, const EmbedderConfig& cfg, int threads) {
    data.validate();
    validate_config(data, cfg);

    const Eigen::Index p =
        static_cast<Eigen::Index>(uint64_t{cfg.pooled_h} * cfg.pooled_w * data.channels);
    const Eigen::Index d = cfg.projection_dim;
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());

    // The projection is generated once, row-major, from a single stream, so
    // the result cannot depend on how rows are scheduled below.
    Eigen::MatrixXd projection(d, p);
    prng::Stream stream(cfg.seed, "embed-projection");
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            projection(i, j) = stream.next_gauss() * scale;

    FeatureMatrix f;
    f.values.resize(n, d);
    f.embedder_id = embedder_id(cfg);
    f.seed = cfg.seed;

    auto embed_range = [&](Eigen::Index begin, Eigen::Index end) {
        Eigen::VectorXd pooled(p);
        for (Eigen::Index i = begin; i < end; ++i) {
            pool_sample(data, static_cast<size_t>(i), cfg, pooled);
            f.values.row(i) = (projection * pooled).array().tanh().transpose();
        }
    };

    int workers = std::max(1, threads);
    if (workers == 1 || n < 2) {
        embed_range(0, n);
    } else {
        workers = static_cast<int>(std::min<Eigen::Index>(workers, n));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        Eigen::Index chunk = (n + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            Eigen::Index b = t * chunk;
            Eigen::Index e = std::min(n, b + chunk);
            if (b >= e) break;
            pool.emplace_back(embed_range, b, e);
        }
        for (std::thread& th : pool)
            th.join();
    }
    return f;
}

}  // namespace splitgauge
