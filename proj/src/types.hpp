#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace splitgauge {

// A labeled image tensor: N samples of H x W x C unsigned bytes, pixels in
// row-major (n, h, w, c) order, labels in [0, class_count).
struct Dataset {
    uint32_t height = 0;
    uint32_t width = 0;
    uint32_t channels = 0;
    uint32_t class_count = 0;
    std::vector<uint8_t> pixels;
    std::vector<uint32_t> labels;

    size_t size() const { return labels.size(); }
    size_t sample_bytes() const {
        return static_cast<size_t>(height) * width * channels;
    }
    const uint8_t* sample(size_t n) const { return pixels.data() + n * sample_bytes(); }

    // Checks label range and pixel/label count consistency.
    void validate() const;
};

// N x d real matrix of embedded samples; rows are samples.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::string embedder_id;
    uint64_t seed = 0;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index dim() const { return values.cols(); }
};

// N x K matrix of classifier posteriors; every row is a probability vector.
struct ProbMatrix {
    Eigen::MatrixXd rows;

    Eigen::Index count() const { return rows.rows(); }
    Eigen::Index classes() const { return rows.cols(); }
};

}  // namespace splitgauge
