#include "tensor_io.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>

#include "error.hpp"

namespace splitgauge {

void Dataset::validate() const {
    if (height == 0 || width == 0 || channels == 0)
        raise(ErrorKind::validation, "dataset: H, W, C must be positive");
    if (pixels.size() != labels.size() * sample_bytes())
        raise(ErrorKind::validation, "dataset: pixel buffer does not match N*H*W*C");
    for (uint32_t label : labels)
        if (label >= class_count)
            raise(ErrorKind::validation,
                  "dataset: label " + std::to_string(label) + " >= class_count " +
                      std::to_string(class_count));
}

}  // namespace splitgauge

namespace splitgauge::io {

namespace {

constexpr char kRawMagic[8] = {'S', 'G', 'T', 'D', '0', '0', '0', '1'};
constexpr char kFeatMagic[8] = {'F', 'E', 'A', 'T', 'M', 'T', 'X', '1'};
constexpr char kProbMagic[8] = {'P', 'R', 'O', 'B', 'M', 'T', 'X', '1'};

uint64_t checked_mul(uint64_t a, uint64_t b) {
    if (b != 0 && a > std::numeric_limits<uint64_t>::max() / b)
        raise(ErrorKind::format, "declared sizes overflow");
    return a * b;
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::io, "cannot open '" + path + "' for reading");
    in.seekg(0, std::ios::end);
    auto end = in.tellg();
    if (end < 0)
        raise(ErrorKind::io, "cannot determine size of '" + path + "'");
    in.seekg(0, std::ios::beg);
    std::vector<uint8_t> buf(static_cast<size_t>(end));
    if (end > 0 && !in.read(reinterpret_cast<char*>(buf.data()), end))
        raise(ErrorKind::io, "short read on '" + path + "'");
    return buf;
}

void write_file(const std::string& path, const std::vector<uint8_t>& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out)
        raise(ErrorKind::io, "write failed on '" + path + "'");
}

// Bounds-checked little-endian cursor. Sizes are validated before any
// allocation that depends on them.
class ByteReader {
public:
    ByteReader(const uint8_t* data, size_t size, std::string context)
        : data_(data), size_(size), ctx_(std::move(context)) {}

    size_t remaining() const { return size_ - off_; }
    size_t offset() const { return off_; }

    const uint8_t* need(size_t n) {
        if (n > remaining())
            raise(ErrorKind::format, ctx_ + ": truncated (need " + std::to_string(n) +
                                         " bytes, have " + std::to_string(remaining()) + ")");
        const uint8_t* p = data_ + off_;
        off_ += n;
        return p;
    }

    void skip(size_t n) { need(n); }

    uint16_t u16() {
        const uint8_t* p = need(2);
        return static_cast<uint16_t>(p[0] | (p[1] << 8));
    }

    uint32_t u32() {
        const uint8_t* p = need(4);
        return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
               (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
    }

    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | (hi << 32);
    }

    const std::string& context() const { return ctx_; }

private:
    const uint8_t* data_;
    size_t size_;
    size_t off_ = 0;
    std::string ctx_;
};

class ByteWriter {
public:
    void u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v));
        buf_.push_back(static_cast<uint8_t>(v >> 8));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        u32(static_cast<uint32_t>(v));
        u32(static_cast<uint32_t>(v >> 32));
    }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
    void bytes(const void* p, size_t n) {
        const uint8_t* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<uint8_t>& out() { return buf_; }

private:
    std::vector<uint8_t> buf_;
};

double rd_f64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return std::bit_cast<double>(v);
}

float rd_f32(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = (v << 8) | p[i];
    return std::bit_cast<float>(v);
}

uint32_t rd_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

Dataset read_raw(const std::string& path) {
    std::vector<uint8_t> buf = read_file(path);
    ByteReader r(buf.data(), buf.size(), "raw tensor '" + path + "'");
    const uint8_t* magic = r.need(8);
    if (std::memcmp(magic, kRawMagic, 8) != 0)
        raise(ErrorKind::format, "'" + path + "' is not an SGTD0001 raw tensor file");
    Dataset d;
    uint32_t n = r.u32();
    d.height = r.u32();
    d.width = r.u32();
    d.channels = r.u32();
    d.class_count = r.u32();
    if (d.height == 0 || d.width == 0 || d.channels == 0)
        raise(ErrorKind::format, "'" + path + "' declares a zero image dimension");
    uint64_t pixel_bytes =
        checked_mul(checked_mul(checked_mul(n, d.height), d.width), d.channels);
    uint64_t expect = 8 + 20 + pixel_bytes + checked_mul(n, 4);
    if (buf.size() != expect)
        raise(ErrorKind::format, "'" + path + "' payload is " + std::to_string(buf.size()) +
                                     " bytes, header implies " + std::to_string(expect));
    const uint8_t* px = r.need(static_cast<size_t>(pixel_bytes));
    d.pixels.assign(px, px + pixel_bytes);
    d.labels.resize(n);
    for (uint32_t i = 0; i < n; ++i)
        d.labels[i] = r.u32();
    d.validate();
    return d;
}

void write_raw(const std::string& path, const Dataset& data) {
    data.validate();
    ByteWriter w;
    w.bytes(kRawMagic, 8);
    w.u32(static_cast<uint32_t>(data.size()));
    w.u32(data.height);
    w.u32(data.width);
    w.u32(data.channels);
    w.u32(data.class_count);
    w.bytes(data.pixels.data(), data.pixels.size());
    for (uint32_t label : data.labels)
        w.u32(label);
    write_file(path, w.out());
}

// ---------------------------------------------------------------------------
// MATLAB Level 5 container (the subset SVHN ships in)
// ---------------------------------------------------------------------------

namespace {

enum MatDataType : uint32_t {
    miINT8 = 1,
    miUINT8 = 2,
    miINT16 = 3,
    miUINT16 = 4,
    miINT32 = 5,
    miUINT32 = 6,
    miSINGLE = 7,
    miDOUBLE = 9,
    miINT64 = 12,
    miUINT64 = 13,
    miMATRIX = 14,
    miCOMPRESSED = 15,
};

enum MatClass : uint32_t {
    mxDOUBLE_CLASS = 6,
    mxSINGLE_CLASS = 7,
    mxINT8_CLASS = 8,
    mxUINT8_CLASS = 9,
    mxINT16_CLASS = 10,
    mxUINT16_CLASS = 11,
    mxINT32_CLASS = 12,
    mxUINT32_CLASS = 13,
    mxINT64_CLASS = 14,
    mxUINT64_CLASS = 15,
};

size_t mat_elem_size(uint32_t type) {
    switch (type) {
        case miINT8:
        case miUINT8:
            return 1;
        case miINT16:
        case miUINT16:
            return 2;
        case miINT32:
        case miUINT32:
        case miSINGLE:
            return 4;
        case miDOUBLE:
        case miINT64:
        case miUINT64:
            return 8;
        default:
            return 0;
    }
}

const char* mat_class_name(uint32_t cls) {
    switch (cls) {
        case mxDOUBLE_CLASS: return "double";
        case mxSINGLE_CLASS: return "single";
        case mxINT8_CLASS: return "int8";
        case mxUINT8_CLASS: return "uint8";
        case mxINT16_CLASS: return "int16";
        case mxUINT16_CLASS: return "uint16";
        case mxINT32_CLASS: return "int32";
        case mxUINT32_CLASS: return "uint32";
        case mxINT64_CLASS: return "int64";
        case mxUINT64_CLASS: return "uint64";
        default: return "unknown";
    }
}

struct MatElement {
    uint32_t type = 0;
    const uint8_t* data = nullptr;
    size_t size = 0;
};

// Reads one tag+payload, handling the packed small-element form and 8-byte
// alignment of the regular form.
MatElement read_mat_element(ByteReader& r) {
    MatElement e;
    uint32_t raw = r.u32();
    if ((raw >> 16) != 0) {
        // small data element: type and byte count share the first word
        e.type = raw & 0xFFFF;
        e.size = raw >> 16;
        if (e.size > 4)
            raise(ErrorKind::format, r.context() + ": small element longer than 4 bytes");
        e.data = r.need(4);
    } else {
        e.type = raw;
        e.size = r.u32();
        e.data = r.need(e.size);
        size_t pad = (8 - (e.size % 8)) % 8;
        if (pad > 0 && r.remaining() >= pad)
            r.skip(pad);
    }
    return e;
}

struct MatArray {
    uint32_t class_id = 0;
    std::string name;
    std::vector<uint32_t> dims;
    uint32_t data_type = 0;
    std::vector<uint8_t> data;
};

MatArray parse_matrix(const uint8_t* payload, size_t size, const std::string& ctx) {
    ByteReader r(payload, size, ctx + " (miMATRIX)");
    MatArray a;

    MatElement flags = read_mat_element(r);
    if (flags.type != miUINT32 || flags.size != 8)
        raise(ErrorKind::format, ctx + ": malformed array-flags element");
    uint32_t flag_word = rd_u32(flags.data);
    a.class_id = flag_word & 0xFF;
    if (flag_word & 0x0800)
        raise(ErrorKind::unsupported, ctx + ": complex arrays are not supported");

    MatElement dims = read_mat_element(r);
    if (dims.type != miINT32 || dims.size % 4 != 0 || dims.size < 8)
        raise(ErrorKind::format, ctx + ": malformed dimensions element");
    for (size_t i = 0; i < dims.size; i += 4) {
        uint32_t v = rd_u32(dims.data + i);
        if (static_cast<int32_t>(v) < 0)
            raise(ErrorKind::format, ctx + ": negative dimension");
        a.dims.push_back(v);
    }

    MatElement name = read_mat_element(r);
    if (name.type != miINT8)
        raise(ErrorKind::format, ctx + ": malformed array-name element");
    a.name.assign(reinterpret_cast<const char*>(name.data), name.size);

    MatElement real = read_mat_element(r);
    if (mat_elem_size(real.type) == 0)
        raise(ErrorKind::unsupported,
              ctx + ": array '" + a.name + "' uses unsupported storage type " +
                  std::to_string(real.type));
    a.data_type = real.type;
    a.data.assign(real.data, real.data + real.size);
    return a;
}

std::vector<uint8_t> zlib_inflate(const uint8_t* data, size_t size, const std::string& ctx) {
    // Compressed elements carry no decompressed-size field; grow with a hard
    // cap so a corrupt stream cannot demand unbounded memory.
    constexpr size_t kMaxDecompressed = size_t{1} << 30;
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK)
        raise(ErrorKind::internal, ctx + ": zlib init failed");
    std::vector<uint8_t> out;
    out.resize(std::min<size_t>(std::max<size_t>(size * 4, 1 << 16), kMaxDecompressed));
    zs.next_in = const_cast<Bytef*>(data);
    zs.avail_in = static_cast<uInt>(size);
    size_t written = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (written == out.size()) {
            if (out.size() >= kMaxDecompressed) {
                inflateEnd(&zs);
                raise(ErrorKind::format, ctx + ": compressed element exceeds 1 GiB limit");
            }
            out.resize(std::min(out.size() * 2, kMaxDecompressed));
        }
        zs.next_out = out.data() + written;
        zs.avail_out = static_cast<uInt>(out.size() - written);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            raise(ErrorKind::format, ctx + ": corrupt zlib stream in compressed element");
        }
        written = out.size() - zs.avail_out;
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out > 0) {
            inflateEnd(&zs);
            raise(ErrorKind::format, ctx + ": truncated zlib stream in compressed element");
        }
    }
    inflateEnd(&zs);
    out.resize(written);
    return out;
}

uint64_t mat_read_int(const uint8_t* p, uint32_t type, const std::string& ctx) {
    switch (type) {
        case miINT8: {
            int8_t v = static_cast<int8_t>(p[0]);
            if (v < 0) raise(ErrorKind::validation, ctx + ": negative label");
            return static_cast<uint64_t>(v);
        }
        case miUINT8:
            return p[0];
        case miINT16: {
            int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
            if (v < 0) raise(ErrorKind::validation, ctx + ": negative label");
            return static_cast<uint64_t>(v);
        }
        case miUINT16:
            return static_cast<uint16_t>(p[0] | (p[1] << 8));
        case miINT32: {
            int32_t v = static_cast<int32_t>(rd_u32(p));
            if (v < 0) raise(ErrorKind::validation, ctx + ": negative label");
            return static_cast<uint64_t>(v);
        }
        case miUINT32:
            return rd_u32(p);
        case miSINGLE: {
            double v = rd_f32(p);
            if (v < 0 || v != std::floor(v))
                raise(ErrorKind::validation, ctx + ": label is not a nonnegative integer");
            return static_cast<uint64_t>(v);
        }
        case miDOUBLE: {
            double v = rd_f64(p);
            if (v < 0 || v != std::floor(v))
                raise(ErrorKind::validation, ctx + ": label is not a nonnegative integer");
            return static_cast<uint64_t>(v);
        }
        default:
            raise(ErrorKind::unsupported, ctx + ": unsupported label storage type");
    }
}

}  // namespace

Dataset read_svhn_mat(const std::string& path, bool remap_label_ten) {
    std::vector<uint8_t> buf = read_file(path);
    const std::string ctx = "mat container '" + path + "'";

    static const uint8_t kHdf5Magic[8] = {0x89, 'H', 'D', 'F', 0x0D, 0x0A, 0x1A, 0x0A};
    if (buf.size() >= 8 && std::memcmp(buf.data(), kHdf5Magic, 8) == 0)
        raise(ErrorKind::unsupported,
              ctx + ": MATLAB v7.3 (HDF5) container detected; only Level 5 files are "
                    "supported, re-save with '-v5'");

    if (buf.size() < 128)
        raise(ErrorKind::format, ctx + ": shorter than the 128-byte Level 5 header");
    uint8_t e0 = buf[126], e1 = buf[127];
    if (e0 == 'M' && e1 == 'I')
        raise(ErrorKind::unsupported, ctx + ": big-endian Level 5 container is not supported");
    if (!(e0 == 'I' && e1 == 'M'))
        raise(ErrorKind::format, ctx + ": not a MATLAB Level 5 file (bad endian indicator)");

    ByteReader r(buf.data(), buf.size(), ctx);
    r.skip(128);

    std::optional<MatArray> x_arr, y_arr;
    std::vector<std::vector<uint8_t>> inflated;  // keeps decompressed buffers alive
    while (r.remaining() >= 8) {
        MatElement e = read_mat_element(r);
        if (e.type == miCOMPRESSED) {
            inflated.push_back(zlib_inflate(e.data, e.size, ctx));
            const std::vector<uint8_t>& plain = inflated.back();
            ByteReader cr(plain.data(), plain.size(), ctx + " (decompressed)");
            if (cr.remaining() < 8)
                raise(ErrorKind::format, ctx + ": empty compressed element");
            e = read_mat_element(cr);
        }
        if (e.type != miMATRIX)
            continue;
        MatArray a = parse_matrix(e.data, e.size, ctx);
        if (a.name == "X")
            x_arr = std::move(a);
        else if (a.name == "y")
            y_arr = std::move(a);
    }

    if (!x_arr || !y_arr)
        raise(ErrorKind::format,
              ctx + ": required variable(s) missing: " +
                  std::string(!x_arr ? "`X` " : "") + std::string(!y_arr ? "`y`" : ""));

    const MatArray& X = *x_arr;
    if (X.class_id != mxUINT8_CLASS)
        raise(ErrorKind::validation, ctx + ": `X` must be uint8, found " +
                                         std::string(mat_class_name(X.class_id)));
    if (X.data_type != miUINT8)
        raise(ErrorKind::unsupported, ctx + ": `X` uses non-uint8 storage");
    if (X.dims.size() != 4)
        raise(ErrorKind::format, ctx + ": `X` must be 4-D (H x W x C x N), found " +
                                     std::to_string(X.dims.size()) + "-D");
    uint64_t h = X.dims[0], w = X.dims[1], c = X.dims[2], n = X.dims[3];
    if (h == 0 || w == 0 || c == 0)
        raise(ErrorKind::format, ctx + ": `X` has a zero spatial dimension");
    uint64_t count = checked_mul(checked_mul(checked_mul(h, w), c), n);
    if (X.data.size() != count)
        raise(ErrorKind::format,
              ctx + ": `X` payload is " + std::to_string(X.data.size()) +
                  " bytes, dimensions imply " + std::to_string(count));

    const MatArray& Y = *y_arr;
    size_t esz = mat_elem_size(Y.data_type);
    uint64_t y_count = 1;
    uint32_t nontrivial_dims = 0;
    for (uint32_t d : Y.dims) {
        y_count = checked_mul(y_count, d);
        if (d > 1) ++nontrivial_dims;
    }
    if (nontrivial_dims > 1)
        raise(ErrorKind::format, ctx + ": `y` must be a vector");
    if (y_count != n)
        raise(ErrorKind::format, ctx + ": `y` has " + std::to_string(y_count) +
                                     " entries, `X` has " + std::to_string(n) + " samples");
    if (Y.data.size() != checked_mul(y_count, esz))
        raise(ErrorKind::format, ctx + ": `y` payload does not match its dimensions");

    Dataset d;
    d.height = static_cast<uint32_t>(h);
    d.width = static_cast<uint32_t>(w);
    d.channels = static_cast<uint32_t>(c);
    d.labels.resize(n);
    uint64_t max_label = 0;
    for (uint64_t i = 0; i < n; ++i) {
        uint64_t v = mat_read_int(Y.data.data() + i * esz, Y.data_type, ctx);
        if (remap_label_ten && v == 10)
            v = 0;
        if (v > 0xFFFFFFFFull)
            raise(ErrorKind::validation, ctx + ": label out of 32-bit range");
        d.labels[i] = static_cast<uint32_t>(v);
        max_label = std::max(max_label, v);
    }
    d.class_count = n == 0 ? 1 : static_cast<uint32_t>(max_label + 1);

    // column-major (h, w, c, n) -> row-major (n, h, w, c)
    d.pixels.resize(count);
    const uint8_t* src = X.data.data();
    for (uint64_t ni = 0; ni < n; ++ni)
        for (uint64_t hi = 0; hi < h; ++hi)
            for (uint64_t wi = 0; wi < w; ++wi)
                for (uint64_t ci = 0; ci < c; ++ci)
                    d.pixels[((ni * h + hi) * w + wi) * c + ci] =
                        src[hi + h * (wi + w * (ci + c * ni))];
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// Feature and probability matrices
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd read_matrix_payload(const std::string& path, const char* magic,
                                    const char* what) {
    std::vector<uint8_t> buf = read_file(path);
    ByteReader r(buf.data(), buf.size(), std::string(what) + " '" + path + "'");
    const uint8_t* m = r.need(8);
    if (std::memcmp(m, magic, 8) != 0)
        raise(ErrorKind::format, "'" + path + "' is not a " + std::string(what) + " file");
    uint32_t n = r.u32();
    uint32_t d = r.u32();
    uint8_t dtype = r.need(1)[0];
    if (dtype != 0 && dtype != 1)
        raise(ErrorKind::unsupported, "'" + path + "': unsupported dtype byte " +
                                          std::to_string(static_cast<int>(dtype)));
    if (d == 0)
        raise(ErrorKind::format, "'" + path + "': zero feature dimension");
    size_t esz = dtype == 0 ? 4 : 8;
    uint64_t expect = 17 + checked_mul(checked_mul(n, d), esz);
    if (buf.size() != expect)
        raise(ErrorKind::format, "'" + path + "' payload is " + std::to_string(buf.size()) +
                                     " bytes, header implies " + std::to_string(expect));
    Eigen::MatrixXd values(n, d);
    const uint8_t* p = r.need(static_cast<size_t>(expect - 17));
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < d; ++j) {
            double v = dtype == 0 ? static_cast<double>(rd_f32(p)) : rd_f64(p);
            if (!std::isfinite(v))
                raise(ErrorKind::validation,
                      "'" + path + "': non-finite entry at row " + std::to_string(i));
            values(i, j) = v;
            p += esz;
        }
    return values;
}

void write_matrix_payload(const std::string& path, const char* magic,
                          const Eigen::MatrixXd& values, bool as_f32) {
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            if (!std::isfinite(values(i, j)))
                raise(ErrorKind::validation, "refusing to write non-finite entry to '" + path + "'");
    ByteWriter w;
    w.bytes(magic, 8);
    w.u32(static_cast<uint32_t>(values.rows()));
    w.u32(static_cast<uint32_t>(values.cols()));
    w.out().push_back(as_f32 ? 0 : 1);
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (as_f32)
                w.f32(static_cast<float>(values(i, j)));
            else
                w.f64(values(i, j));
        }
    write_file(path, w.out());
}

// Trims ASCII whitespace; returns nullopt when the cell is not a number.
std::optional<double> parse_cell(const std::string& cell) {
    size_t b = cell.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return std::nullopt;
    size_t e = cell.find_last_not_of(" \t\r");
    std::string t = cell.substr(b, e - b + 1);
    char* endp = nullptr;
    double v = std::strtod(t.c_str(), &endp);
    if (endp != t.c_str() + t.size())
        return std::nullopt;
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

ProbMatrix validate_probs(Eigen::MatrixXd rows, const std::string& path) {
    constexpr double kTol = 1e-6;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            double v = rows(i, j);
            if (!std::isfinite(v) || v < 0.0)
                raise(ErrorKind::validation,
                      "'" + path + "': negative or non-finite probability in row " +
                          std::to_string(i));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kTol)
            raise(ErrorKind::validation,
                  "'" + path + "': row " + std::to_string(i) + " sums to " +
                      std::to_string(sum) + ", outside 1 +/- 1e-6");
        rows.row(i) /= sum;
    }
    return ProbMatrix{std::move(rows)};
}

ProbMatrix read_probs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::io, "cannot open '" + path + "' for reading");
    std::vector<std::vector<double>> data;
    std::string line;
    size_t lineno = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::vector<std::string> cells = split_csv_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        bool numeric = true;
        for (const std::string& cell : cells) {
            std::optional<double> v = parse_cell(cell);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (first_content_line) {  // header row
                first_content_line = false;
                continue;
            }
            raise(ErrorKind::validation,
                  "'" + path + "': non-numeric cell at line " + std::to_string(lineno));
        }
        first_content_line = false;
        if (!data.empty() && row.size() != data.front().size())
            raise(ErrorKind::validation,
                  "'" + path + "': ragged row at line " + std::to_string(lineno) + " (" +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(data.front().size()) + ")");
        data.push_back(std::move(row));
    }
    if (data.empty())
        raise(ErrorKind::validation, "'" + path + "': no data rows");
    Eigen::MatrixXd rows(data.size(), data.front().size());
    for (size_t i = 0; i < data.size(); ++i)
        for (size_t j = 0; j < data[i].size(); ++j)
            rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i][j];
    return validate_probs(std::move(rows), path);
}

}  // namespace

FeatureMatrix load_features(const std::string& path) {
    FeatureMatrix f;
    f.values = read_matrix_payload(path, kFeatMagic, "FEATMTX1 feature matrix");
    f.embedder_id = "external";
    return f;
}

void save_features(const std::string& path, const FeatureMatrix& f, bool as_f32) {
    if (f.dim() == 0)
        raise(ErrorKind::validation, "refusing to write zero-dimension feature matrix");
    write_matrix_payload(path, kFeatMagic, f.values, as_f32);
}

ProbMatrix read_probs(const std::string& path) {
    std::vector<uint8_t> head = read_file(path);
    if (head.size() >= 8 && std::memcmp(head.data(), kProbMagic, 8) == 0)
        return validate_probs(read_matrix_payload(path, kProbMagic, "PROBMTX1 matrix"), path);
    return read_probs_csv(path);
}

void write_probs(const std::string& path, const ProbMatrix& p) {
    write_matrix_payload(path, kProbMagic, p.rows, false);
}

std::vector<uint32_t> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::io, "cannot open '" + path + "' for reading");
    std::vector<uint32_t> labels;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::optional<double> v = parse_cell(line);
        if (!v || *v < 0 || *v != std::floor(*v) || *v > 0xFFFFFFFF)
            raise(ErrorKind::validation, "'" + path + "': line " + std::to_string(lineno) +
                                             " is not a nonnegative integer label");
        labels.push_back(static_cast<uint32_t>(*v));
    }
    return labels;
}

void write_labels_csv(const std::string& path, const std::vector<uint32_t>& labels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot open '" + path + "' for writing");
    for (uint32_t label : labels)
        out << label << '\n';
    if (!out)
        raise(ErrorKind::io, "write failed on '" + path + "'");
}

}  // namespace splitgauge::io
