#pragma once

#include <string>
#include <vector>

#include "types.hpp"

namespace splitgauge::io {

// Raw labeled-tensor container ("SGTD0001"): magic, u32 N/H/W/C/K,
// N*H*W*C pixel bytes, N u32 labels. Little-endian, bit-exact round trip.
Dataset read_raw(const std::string& path);
void write_raw(const std::string& path, const Dataset& data);

// SVHN-style MATLAB Level 5 container holding a 4-D uint8 array `X`
// (H x W x C x N) and an integer vector `y`. Axes are reordered to
// N x H x W x C. With remap_label_ten, label 10 becomes class 0 (the SVHN
// convention for digit zero). zlib-compressed elements are supported;
// v7.3 (HDF5) containers are rejected with an explicit message.
Dataset read_svhn_mat(const std::string& path, bool remap_label_ten);

// Feature matrix container ("FEATMTX1"): magic, u32 n, u32 d,
// u8 dtype (0 = f32, 1 = f64), row-major payload.
FeatureMatrix load_features(const std::string& path);
void save_features(const std::string& path, const FeatureMatrix& f, bool as_f32 = false);

// Probability matrix, either CSV (optional header row, detected by a
// non-numeric first row) or a "PROBMTX1" binary mirroring the feature
// format. Rows must be nonnegative and sum to 1 within 1e-6; rows inside
// the tolerance are renormalized exactly to 1.
ProbMatrix read_probs(const std::string& path);
void write_probs(const std::string& path, const ProbMatrix& p);

// One nonnegative integer label per line.
std::vector<uint32_t> read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path, const std::vector<uint32_t>& labels);

}  // namespace splitgauge::io
