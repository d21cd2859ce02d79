// SPDX-License-Identifier: Apache-2.0
//
// File formats. Binary formats are little-endian regardless of host order
// and serialize canonically: equal values produce identical bytes. Writers
// go through a temp file plus rename, so readers never observe a partial
// file. Text formats (cameras, class tables, scene specs) are line-oriented
// with '#' comments and survive parse-print-parse exactly.

#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "octovox/errors.hpp"
#include "octovox/geometry.hpp"
#include "octovox/grid.hpp"
#include "octovox/octree.hpp"
#include "octovox/rectify.hpp"
#include "octovox/semantic_init.hpp"
#include "octovox/synth.hpp"

namespace octovox {

inline constexpr std::uint16_t grid_format_version = 1;
inline constexpr std::uint16_t octree_format_version = 1;

enum class GridPayloadKind : std::uint8_t {
    label = 0,   // u16 per cell
    scalar = 1,  // f32 per cell
    binary = 2,  // u8 per cell
};

enum class OctreeFileKind : std::uint8_t {
    structure = 0,
    mask = 1,
    sparse_label = 2,
    sparse_scalar = 3,
};

namespace detail {

// ---- raw file transport ----------------------------------------------------

inline std::vector<std::uint8_t> load_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open " + path + " for reading");
    }
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw io_error("read failed for " + path);
    }
    return data;
}

inline void save_bytes_atomic(const std::string& path, const void* data, std::size_t size) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw io_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw io_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw io_error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

// ---- little-endian byte streams --------------------------------------------

class ByteWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(v); }

    void put_u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v & 0xff));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    }

    void put_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }

    void put_magic(const char* magic) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(magic[i]));
    }

    const std::vector<std::uint8_t>& bytes() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    explicit ByteReader(const std::vector<std::uint8_t>& data)
        : ByteReader(data.data(), data.size()) {}

    std::size_t offset() const { return off_; }
    std::size_t remaining() const { return size_ - off_; }

    void expect_magic(const char* magic, const char* what) {
        if (remaining() < 4 || std::memcmp(data_ + off_, magic, 4) != 0) {
            throw parse_error(parse_fault::bad_magic, off_,
                              std::string(what) + ": bad magic, expected \"" + magic + "\"");
        }
        off_ += 4;
    }

    std::uint8_t get_u8(const char* what) {
        need(1, what);
        return data_[off_++];
    }

    std::uint16_t get_u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(data_[off_]) |
                          static_cast<std::uint16_t>(data_[off_ + 1]) << 8;
        off_ += 2;
        return v;
    }

    std::uint32_t get_u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[off_ + i]) << (8 * i);
        off_ += 4;
        return v;
    }

    std::uint64_t get_u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[off_ + i]) << (8 * i);
        off_ += 8;
        return v;
    }

    float get_f32(const char* what) { return std::bit_cast<float>(get_u32(what)); }

    void require_payload(std::uint64_t count, std::size_t elem_size, const char* what) {
        if (count > remaining() / elem_size) {
            throw parse_error(parse_fault::truncated, off_,
                              std::string(what) + ": need " + std::to_string(count) + " x " +
                                  std::to_string(elem_size) + " bytes, have " +
                                  std::to_string(remaining()));
        }
    }

    void finish(const char* what) {
        if (off_ != size_) {
            throw parse_error(parse_fault::trailing_data, off_,
                              std::string(what) + ": " + std::to_string(size_ - off_) +
                                  " trailing bytes");
        }
    }

private:
    void need(std::size_t n, const char* what) {
        if (off_ + n > size_) {
            throw parse_error(parse_fault::truncated, off_,
                              std::string(what) + ": unexpected end of data");
        }
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t off_ = 0;
};

// ---- text helpers ----------------------------------------------------------

struct TextLine {
    std::size_t offset = 0;  // byte offset of the line start
    std::string text;
};

inline std::vector<TextLine> split_lines(const std::vector<std::uint8_t>& data) {
    std::vector<TextLine> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= data.size(); ++i) {
        if (i == data.size() || data[i] == '\n') {
            std::string text(data.begin() + static_cast<std::ptrdiff_t>(start),
                             data.begin() + static_cast<std::ptrdiff_t>(i));
            if (!text.empty() && text.back() == '\r') text.pop_back();
            if (i < data.size() || !text.empty()) {
                lines.push_back(TextLine{start, std::move(text)});
            }
            start = i + 1;
        }
    }
    return lines;
}

inline bool is_content_line(const std::string& text) {
    for (char c : text) {
        if (c == '#') return false;
        if (c != ' ' && c != '\t') return true;
    }
    return false;
}

// Forward-only cursor over content lines.
struct LineCursor {
    const std::vector<TextLine>* lines;
    std::size_t index = 0;

    const TextLine* peek() {
        while (index < lines->size() && !is_content_line((*lines)[index].text)) ++index;
        return index < lines->size() ? &(*lines)[index] : nullptr;
    }

    const TextLine* next() {
        const TextLine* line = peek();
        if (line) ++index;
        return line;
    }
};

inline std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
        if (j > i) tokens.push_back(text.substr(i, j - i));
        i = j;
    }
    return tokens;
}

inline double parse_real(std::string_view token, std::size_t offset, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw parse_error(parse_fault::bad_value, offset,
                          std::string(what) + ": malformed number \"" + std::string(token) + "\"");
    }
    return v;
}

inline std::uint64_t parse_uint(std::string_view token, std::size_t offset, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw parse_error(parse_fault::bad_value, offset,
                          std::string(what) + ": malformed integer \"" + std::string(token) +
                              "\"");
    }
    return v;
}

// Shortest representation that reparses to the same double.
inline std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// "key: value...(tokens)" split; returns false when the line has no colon.
inline bool split_key_line(const std::string& text, std::string& key, std::string& rest) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) return false;
    key = text.substr(0, colon);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t start = key.find_first_not_of(" \t");
    if (start != std::string::npos && start > 0) key = key.substr(start);
    rest = text.substr(colon + 1);
    return true;
}

inline GridDims level_dims_checked(const GridDims& base, std::uint32_t level,
                                   std::size_t header_offset) {
    const std::uint64_t x = static_cast<std::uint64_t>(base.x) << level;
    const std::uint64_t y = static_cast<std::uint64_t>(base.y) << level;
    const std::uint64_t z = static_cast<std::uint64_t>(base.z) << level;
    if (x > 0xffffffffull || y > 0xffffffffull || z > 0xffffffffull) {
        throw parse_error(parse_fault::bad_value, header_offset,
                          "octree base dims overflow when doubled to level " +
                              std::to_string(level));
    }
    return GridDims{static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                    static_cast<std::uint32_t>(z)};
}

}  // namespace detail

// ---- grid files ("OCCG") ---------------------------------------------------

namespace detail {

inline void write_grid_header(ByteWriter& w, GridPayloadKind kind, const GridDims& dims,
                              const Vec3f& voxel_size, const Vec3f& origin) {
    w.put_magic("OCCG");
    w.put_u16(grid_format_version);
    w.put_u8(static_cast<std::uint8_t>(kind));
    w.put_u32(dims.x);
    w.put_u32(dims.y);
    w.put_u32(dims.z);
    for (float v : voxel_size) w.put_f32(v);
    for (float v : origin) w.put_f32(v);
}

struct GridHeader {
    GridPayloadKind kind;
    GridDims dims;
    Vec3f voxel_size;
    Vec3f origin;
    std::size_t kind_offset = 0;
};

inline GridHeader read_grid_header(ByteReader& r) {
    r.expect_magic("OCCG", "grid file");
    const std::uint16_t version = r.get_u16("grid version");
    if (version != grid_format_version) {
        throw parse_error(parse_fault::bad_version, r.offset() - 2,
                          "grid file version " + std::to_string(version) + ", expected " +
                              std::to_string(grid_format_version));
    }
    GridHeader h;
    h.kind_offset = r.offset();
    const std::uint8_t kind = r.get_u8("grid payload kind");
    if (kind > 2) {
        throw parse_error(parse_fault::bad_value, h.kind_offset,
                          "unknown grid payload kind " + std::to_string(kind));
    }
    h.kind = static_cast<GridPayloadKind>(kind);
    h.dims.x = r.get_u32("grid dims");
    h.dims.y = r.get_u32("grid dims");
    h.dims.z = r.get_u32("grid dims");
    for (float& v : h.voxel_size) v = r.get_f32("grid voxel size");
    for (float& v : h.origin) v = r.get_f32("grid origin");
    return h;
}

}  // namespace detail

inline void write_grid(const std::string& path, const DenseGrid<Label>& grid) {
    detail::ByteWriter w;
    detail::write_grid_header(w, GridPayloadKind::label, grid.dims(), grid.voxel_size(),
                              grid.origin());
    for (Label v : grid.values()) w.put_u16(v);
    detail::save_bytes_atomic(path, w.bytes().data(), w.bytes().size());
}

inline void write_grid(const std::string& path, const DenseGrid<float>& grid) {
    detail::ByteWriter w;
    detail::write_grid_header(w, GridPayloadKind::scalar, grid.dims(), grid.voxel_size(),
                              grid.origin());
    for (float v : grid.values()) w.put_f32(v);
    detail::save_bytes_atomic(path, w.bytes().data(), w.bytes().size());
}

inline void write_grid(const std::string& path, const DenseGrid<std::uint8_t>& grid) {
    detail::ByteWriter w;
    detail::write_grid_header(w, GridPayloadKind::binary, grid.dims(), grid.voxel_size(),
                              grid.origin());
    for (std::uint8_t v : grid.values()) w.put_u8(v);
    detail::save_bytes_atomic(path, w.bytes().data(), w.bytes().size());
}

using GridVariant =
    std::variant<DenseGrid<Label>, DenseGrid<float>, DenseGrid<std::uint8_t>>;

inline GridVariant read_grid_any(const std::string& path) {
    const auto data = detail::load_bytes(path);
    detail::ByteReader r(data);
    const detail::GridHeader h = detail::read_grid_header(r);
    const std::uint64_t count = h.dims.cell_count();
    GridVariant out;
    switch (h.kind) {
        case GridPayloadKind::label: {
            r.require_payload(count, 2, "grid values");
            DenseGrid<Label> grid(h.dims, h.voxel_size, h.origin);
            for (std::uint64_t i = 0; i < count; ++i) grid[i] = r.get_u16("grid values");
            out = std::move(grid);
            break;
        }
        case GridPayloadKind::scalar: {
            r.require_payload(count, 4, "grid values");
            DenseGrid<float> grid(h.dims, h.voxel_size, h.origin);
            for (std::uint64_t i = 0; i < count; ++i) grid[i] = r.get_f32("grid values");
            out = std::move(grid);
            break;
        }
        case GridPayloadKind::binary: {
            r.require_payload(count, 1, "grid values");
            DenseGrid<std::uint8_t> grid(h.dims, h.voxel_size, h.origin);
            for (std::uint64_t i = 0; i < count; ++i) grid[i] = r.get_u8("grid values");
            out = std::move(grid);
            break;
        }
    }
    r.finish("grid file");
    return out;
}

namespace detail {

template <typename T>
DenseGrid<T> read_grid_as(const std::string& path, GridPayloadKind want, const char* name) {
    GridVariant any = read_grid_any(path);
    if (auto* grid = std::get_if<DenseGrid<T>>(&any)) {
        return std::move(*grid);
    }
    throw parse_error(parse_fault::bad_value, 6,
                      path + ": expected a " + name + " grid (payload kind " +
                          std::to_string(static_cast<int>(want)) + ")");
}

}  // namespace detail

inline DenseGrid<Label> read_label_grid(const std::string& path) {
    return detail::read_grid_as<Label>(path, GridPayloadKind::label, "label");
}

inline DenseGrid<float> read_scalar_grid(const std::string& path) {
    return detail::read_grid_as<float>(path, GridPayloadKind::scalar, "scalar");
}

inline DenseGrid<std::uint8_t> read_binary_grid(const std::string& path) {
    return detail::read_grid_as<std::uint8_t>(path, GridPayloadKind::binary, "binary");
}

// ---- octree files ("OCTS") -------------------------------------------------

namespace detail {

inline void write_octree_header(ByteWriter& w, OctreeFileKind kind, std::uint32_t depth,
                                const GridDims& base) {
    w.put_magic("OCTS");
    w.put_u16(octree_format_version);
    w.put_u8(static_cast<std::uint8_t>(kind));
    w.put_u8(static_cast<std::uint8_t>(depth));
    w.put_u32(base.x);
    w.put_u32(base.y);
    w.put_u32(base.z);
}

struct OctreeHeader {
    OctreeFileKind kind;
    std::uint32_t depth;
    GridDims base;
    std::size_t kind_offset = 0;
    std::size_t depth_offset = 0;
};

inline OctreeHeader read_octree_header(ByteReader& r) {
    r.expect_magic("OCTS", "octree file");
    const std::uint16_t version = r.get_u16("octree version");
    if (version != octree_format_version) {
        throw parse_error(parse_fault::bad_version, r.offset() - 2,
                          "octree file version " + std::to_string(version) + ", expected " +
                              std::to_string(octree_format_version));
    }
    OctreeHeader h;
    h.kind_offset = r.offset();
    const std::uint8_t kind = r.get_u8("octree kind");
    if (kind > 3) {
        throw parse_error(parse_fault::bad_value, h.kind_offset,
                          "unknown octree file kind " + std::to_string(kind));
    }
    h.kind = static_cast<OctreeFileKind>(kind);
    h.depth_offset = r.offset();
    h.depth = r.get_u8("octree depth");
    if (h.depth < 2 || h.depth > 16) {
        throw parse_error(parse_fault::bad_value, h.depth_offset,
                          "octree depth " + std::to_string(h.depth) + " outside [2, 16]");
    }
    h.base.x = r.get_u32("octree base dims");
    h.base.y = r.get_u32("octree base dims");
    h.base.z = r.get_u32("octree base dims");
    if (h.base.x == 0 || h.base.y == 0 || h.base.z == 0) {
        throw parse_error(parse_fault::bad_value, h.depth_offset + 1,
                          "octree base dims " + h.base.to_string() + " contain zero");
    }
    return h;
}

}  // namespace detail

inline OctreeFileKind peek_octree_kind(const std::string& path) {
    const auto data = detail::load_bytes(path);
    detail::ByteReader r(data);
    return detail::read_octree_header(r).kind;
}

inline void write_structure(const std::string& path, const OctreeStructure& s) {
    detail::check_pyramid_dims(s.split, "structure");
    detail::ByteWriter w;
    detail::write_octree_header(w, OctreeFileKind::structure, s.depth(), s.base_dims());
    for (const auto& level : s.split) {
        for (std::uint8_t v : level.values()) w.put_u8(v ? 1 : 0);
    }
    detail::save_bytes_atomic(path, w.bytes().data(), w.bytes().size());
}

inline OctreeStructure read_structure(const std::string& path) {
    const auto data = detail::load_bytes(path);
    detail::ByteReader r(data);
    const detail::OctreeHeader h = detail::read_octree_header(r);
    if (h.kind != OctreeFileKind::structure) {
        throw parse_error(parse_fault::bad_value, h.kind_offset,
                          path + ": expected a structure file, found kind " +
                              std::to_string(static_cast<int>(h.kind)));
    }
    OctreeStructure s;
    s.split.reserve(h.depth - 1);
    for (std::uint32_t l = 0; l + 1 < h.depth; ++l) {
        const GridDims d = detail::level_dims_checked(h.base, l, h.depth_offset);
        const std::uint64_t count = d.cell_count();
        r.require_payload(count, 1, "structure level");
        DenseGrid<std::uint8_t> level(d);
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::size_t off = r.offset();
            const std::uint8_t v = r.get_u8("structure level");
            if (v > 1) {
                throw parse_error(parse_fault::bad_value, off,
                                  "structure split value " + std::to_string(v) +
                                      " is not 0 or 1");
            }
            level[i] = v;
        }
        s.split.push_back(std::move(level));
    }
    r.finish("structure file");
    const auto violations = validate_structure(s);
    if (!violations.empty()) {
        const StructureViolation& v = violations.front();
        const char* kind = v.kind == StructureViolation::Kind::monotonicity
                               ? "split under an unsplit parent"
                               : "finest cell not covered exactly once";
        throw structure_error(path + ": invalid structure, first violation: " + kind +
                              " at level " + std::to_string(v.level) + " cell (" +
                              std::to_string(v.coord.x) + "," + std::to_string(v.coord.y) + "," +
                              std::to_string(v.coord.z) + "); " +
                              std::to_string(violations.size()) + " violation(s) total");
    }
    return s;
}

inline void write_mask(const std::string& path, const OctreeMask& mask) {
    detail::check_pyramid_dims(mask.levels, "mask");
    detail::ByteWriter w;
    detail::write_octree_header(w, OctreeFileKind::mask, mask.depth(), mask.base_dims());
    for (const auto& level : mask.levels) {
        for (float v : level.values()) w.put_f32(v);
    }
    detail::save_bytes_atomic(path, w.bytes().data(), w.bytes().size());
}

inline OctreeMask read_mask(const std::string& path) {
    const auto data = detail::load_bytes(path);
    detail::ByteReader r(data);
    const detail::OctreeHeader h = detail::read_octree_header(r);
    if (h.kind != OctreeFileKind::mask) {
        throw parse_error(parse_fault::bad_value, h.kind_offset,
                          path + ": expected a mask file, found kind " +
                              std::to_string(static_cast<int>(h.kind)));
    }
    OctreeMask mask;
    mask.levels.reserve(h.depth - 1);
    for (std::uint32_t l = 0; l + 1 < h.depth; ++l) {
        const GridDims d = detail::level_dims_checked(h.base, l, h.depth_offset);
        const std::uint64_t count = d.cell_count();
        r.require_payload(count, 4, "mask level");
        DenseGrid<float> level(d);
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::size_t off = r.offset();
            const float v = r.get_f32("mask level");
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw parse_error(parse_fault::bad_value, off,
                                  "mask probability outside [0, 1]");
            }
            level[i] = v;
        }
        mask.levels.push_back(std::move(level));
    }
    r.finish("mask file");
    return mask;
}

namespace detail {

template <typename T, OctreeFileKind Kind>
void write_sparse_impl(const std::string& path, const SparseOctreeField<T>& field,
                       void (ByteWriter::*put_payload)(T)) {
    if (field.depth < 2 || field.depth > 16 || field.base_dims.cell_count() == 0) {
        throw config_error("sparse field shape " + field.base_dims.to_string() + " x" +
                           std::to_string(field.depth) + " is not serializable");
    }
    ByteWriter w;
    write_octree_header(w, Kind, field.depth, field.base_dims);
    w.put_u64(field.leaves.size());
    for (const auto& leaf : field.leaves) {
        w.put_u8(static_cast<std::uint8_t>(leaf.level));
        w.put_u32(leaf.coord.x);
        w.put_u32(leaf.coord.y);
        w.put_u32(leaf.coord.z);
        (w.*put_payload)(leaf.payload);
    }
    save_bytes_atomic(path, w.bytes().data(), w.bytes().size());
}

template <typename T>
SparseOctreeField<T> read_sparse_impl(const std::string& path, OctreeFileKind want,
                                      std::size_t payload_size,
                                      T (ByteReader::*get_payload)(const char*)) {
    const auto data = load_bytes(path);
    ByteReader r(data);
    const OctreeHeader h = read_octree_header(r);
    if (h.kind != want) {
        throw parse_error(parse_fault::bad_value, h.kind_offset,
                          path + ": expected a sparse field file of kind " +
                              std::to_string(static_cast<int>(want)) + ", found " +
                              std::to_string(static_cast<int>(h.kind)));
    }
    SparseOctreeField<T> field;
    field.depth = h.depth;
    field.base_dims = h.base;
    const std::uint64_t count = r.get_u64("leaf count");
    r.require_payload(count, 13 + payload_size, "leaf records");
    field.leaves.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        OctreeLeaf<T> leaf;
        const std::size_t rec_off = r.offset();
        leaf.level = r.get_u8("leaf level");
        if (leaf.level >= h.depth) {
            throw parse_error(parse_fault::bad_value, rec_off,
                              "leaf level " + std::to_string(leaf.level) + " outside depth " +
                                  std::to_string(h.depth));
        }
        leaf.coord.x = r.get_u32("leaf coord");
        leaf.coord.y = r.get_u32("leaf coord");
        leaf.coord.z = r.get_u32("leaf coord");
        const GridDims d = level_dims_checked(h.base, leaf.level, h.depth_offset);
        if (leaf.coord.x >= d.x || leaf.coord.y >= d.y || leaf.coord.z >= d.z) {
            throw parse_error(parse_fault::bad_value, rec_off,
                              "leaf cell outside level " + std::to_string(leaf.level) +
                                  " dims " + d.to_string());
        }
        leaf.payload = (r.*get_payload)("leaf payload");
        field.leaves.push_back(leaf);
    }
    r.finish("sparse field file");
    return field;
}

}  // namespace detail

inline void write_sparse(const std::string& path, const SparseOctreeField<Label>& field) {
    detail::write_sparse_impl<Label, OctreeFileKind::sparse_label>(path, field,
                                                                   &detail::ByteWriter::put_u16);
}

inline void write_sparse(const std::string& path, const SparseOctreeField<float>& field) {
    detail::write_sparse_impl<float, OctreeFileKind::sparse_scalar>(path, field,
                                                                    &detail::ByteWriter::put_f32);
}

inline SparseOctreeField<Label> read_sparse_label(const std::string& path) {
    return detail::read_sparse_impl<Label>(path, OctreeFileKind::sparse_label, 2,
                                           &detail::ByteReader::get_u16);
}

inline SparseOctreeField<float> read_sparse_scalar(const std::string& path) {
    return detail::read_sparse_impl<float>(path, OctreeFileKind::sparse_scalar, 4,
                                           &detail::ByteReader::get_f32);
}

// ---- camera text files -----------------------------------------------------

inline void write_cameras(const std::string& path, const std::vector<CameraModel>& cameras) {
    std::string out;
    out += "OCAM1\n";
    out += "# extrinsics map world homogeneous coordinates into the camera frame\n";
    for (const CameraModel& cam : cameras) {
        cam.validate();
        out += "intrinsics:";
        for (double v : cam.intrinsics) out += " " + detail::fmt_real(v);
        out += "\nextrinsics:";
        for (double v : cam.extrinsics) out += " " + detail::fmt_real(v);
        out += "\nimage_size: " + std::to_string(cam.image_width) + " " +
               std::to_string(cam.image_height) + "\n";
    }
    detail::save_bytes_atomic(path, out.data(), out.size());
}

inline std::vector<CameraModel> read_cameras(const std::string& path) {
    const auto data = detail::load_bytes(path);
    const auto lines = detail::split_lines(data);
    detail::LineCursor cur{&lines};
    const detail::TextLine* magic = cur.next();
    if (!magic || magic->text != "OCAM1") {
        throw parse_error(parse_fault::bad_magic, magic ? magic->offset : 0,
                          path + ": expected camera file magic \"OCAM1\"");
    }
    std::vector<CameraModel> cameras;
    while (cur.peek()) {
        CameraModel cam;
        const std::size_t block_offset = cur.peek()->offset;
        const auto expect_reals = [&](const char* key, double* dst, std::size_t n) {
            const detail::TextLine* line = cur.next();
            if (!line) {
                throw parse_error(parse_fault::truncated, data.size(),
                                  path + ": camera block ends before " + key);
            }
            std::string k, rest;
            if (!detail::split_key_line(line->text, k, rest) || k != key) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": expected \"" + key + ":\" line");
            }
            const auto tokens = detail::split_tokens(rest);
            if (tokens.size() != n) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": " + key + " needs " + std::to_string(n) +
                                      " values, got " + std::to_string(tokens.size()));
            }
            for (std::size_t i = 0; i < n; ++i) {
                dst[i] = detail::parse_real(tokens[i], line->offset, key);
            }
        };
        expect_reals("intrinsics", cam.intrinsics.data(), 9);
        expect_reals("extrinsics", cam.extrinsics.data(), 16);
        {
            const detail::TextLine* line = cur.next();
            if (!line) {
                throw parse_error(parse_fault::truncated, data.size(),
                                  path + ": camera block ends before image_size");
            }
            std::string k, rest;
            if (!detail::split_key_line(line->text, k, rest) || k != "image_size") {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": expected \"image_size:\" line");
            }
            const auto tokens = detail::split_tokens(rest);
            if (tokens.size() != 2) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": image_size needs 2 values");
            }
            const std::uint64_t wpx = detail::parse_uint(tokens[0], line->offset, "image_size");
            const std::uint64_t hpx = detail::parse_uint(tokens[1], line->offset, "image_size");
            if (wpx == 0 || hpx == 0 || wpx > 0xffffffffull || hpx > 0xffffffffull) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": image_size out of range");
            }
            cam.image_width = static_cast<std::uint32_t>(wpx);
            cam.image_height = static_cast<std::uint32_t>(hpx);
        }
        try {
            cam.validate();
        } catch (const config_error& e) {
            throw parse_error(parse_fault::bad_value, block_offset,
                              path + ": invalid camera: " + e.what());
        }
        cameras.push_back(cam);
    }
    return cameras;
}

// ---- class table text files ------------------------------------------------

inline void write_class_table(const std::string& path, const ClassTable& table) {
    std::string out;
    out += "# <label_id> <category>\n";
    for (const auto& [id, cls] : table.entries) {
        out += std::to_string(id);
        out += ' ';
        out += sem_class_name(cls);
        out += '\n';
    }
    detail::save_bytes_atomic(path, out.data(), out.size());
}

inline ClassTable read_class_table(const std::string& path) {
    const auto data = detail::load_bytes(path);
    const auto lines = detail::split_lines(data);
    ClassTable table;
    for (const detail::TextLine& line : lines) {
        if (!detail::is_content_line(line.text)) continue;
        const auto tokens = detail::split_tokens(line.text);
        if (tokens.size() != 2) {
            throw parse_error(parse_fault::bad_value, line.offset,
                              path + ": class table lines are \"<label_id> <category>\"");
        }
        const std::uint64_t id = detail::parse_uint(tokens[0], line.offset, "label id");
        if (id > 0xffff) {
            throw parse_error(parse_fault::bad_value, line.offset,
                              path + ": label id " + std::to_string(id) + " exceeds 65535");
        }
        const auto cls = parse_sem_class(std::string(tokens[1]));
        if (!cls) {
            throw parse_error(parse_fault::bad_value, line.offset,
                              path + ": unknown category \"" + std::string(tokens[1]) + "\"");
        }
        const Label label = static_cast<Label>(id);
        if (table.entries.count(label)) {
            throw parse_error(parse_fault::bad_value, line.offset,
                              path + ": duplicate entry for label " + std::to_string(id));
        }
        table.set(label, *cls);
    }
    return table;
}

// ---- segmentation map rasters ----------------------------------------------

inline void write_segmap(const std::string& path, const SegMap& seg,
                         const std::string& class_table_ref = "none") {
    if (class_table_ref.find('\n') != std::string::npos) {
        throw config_error("segmap class table reference must be a single line");
    }
    if (seg.classes.size() != static_cast<std::size_t>(seg.width) * seg.height) {
        throw config_error("segmap raster size does not match its dimensions");
    }
    std::string out;
    out += "OSEG1\n";
    out += std::to_string(seg.width) + "\n";
    out += std::to_string(seg.height) + "\n";
    out += class_table_ref + "\n";
    const std::size_t header = out.size();
    std::vector<std::uint8_t> bytes(out.begin(), out.end());
    bytes.resize(header + seg.classes.size());
    for (std::size_t i = 0; i < seg.classes.size(); ++i) {
        bytes[header + i] = static_cast<std::uint8_t>(seg.classes[i]);
    }
    detail::save_bytes_atomic(path, bytes.data(), bytes.size());
}

struct SegMapFile {
    SegMap map;
    std::string class_table_ref;
};

inline SegMapFile read_segmap(const std::string& path) {
    const auto data = detail::load_bytes(path);
    // Four newline-terminated header lines, then the raw raster.
    std::array<std::string, 4> header;
    std::array<std::size_t, 4> offsets{};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        offsets[i] = pos;
        std::size_t eol = pos;
        while (eol < data.size() && data[eol] != '\n') ++eol;
        if (eol == data.size()) {
            throw parse_error(parse_fault::truncated, pos,
                              path + ": segmap header line " + std::to_string(i + 1) +
                                  " missing");
        }
        header[i].assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                         data.begin() + static_cast<std::ptrdiff_t>(eol));
        pos = eol + 1;
    }
    if (header[0] != "OSEG1") {
        throw parse_error(parse_fault::bad_magic, offsets[0],
                          path + ": expected segmap magic \"OSEG1\"");
    }
    const std::uint64_t width = detail::parse_uint(header[1], offsets[1], "segmap width");
    const std::uint64_t height = detail::parse_uint(header[2], offsets[2], "segmap height");
    if (width > 0xffffffffull || height > 0xffffffffull) {
        throw parse_error(parse_fault::bad_value, offsets[1], path + ": segmap size out of range");
    }
    SegMapFile out;
    out.class_table_ref = header[3];
    out.map.width = static_cast<std::uint32_t>(width);
    out.map.height = static_cast<std::uint32_t>(height);
    const std::uint64_t count = width * height;
    if (data.size() - pos < count) {
        throw parse_error(parse_fault::truncated, data.size(),
                          path + ": segmap raster needs " + std::to_string(count) +
                              " bytes, have " + std::to_string(data.size() - pos));
    }
    if (data.size() - pos > count) {
        throw parse_error(parse_fault::trailing_data, pos + count,
                          path + ": " + std::to_string(data.size() - pos - count) +
                              " trailing bytes after segmap raster");
    }
    out.map.classes.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint8_t v = data[pos + i];
        if (v > 3) {
            throw parse_error(parse_fault::bad_value, pos + i,
                              path + ": segmap class byte " + std::to_string(v) +
                                  " outside [0, 3]");
        }
        out.map.classes.push_back(static_cast<SemClass>(v));
    }
    return out;
}

// ---- scene spec text files -------------------------------------------------

inline void write_scene_spec(const std::string& path, const SceneSpec& spec) {
    std::string out;
    out += "OSCN1\n";
    out += "seed: " + std::to_string(spec.seed) + "\n";
    out += "dims: " + std::to_string(spec.dims.x) + " " + std::to_string(spec.dims.y) + " " +
           std::to_string(spec.dims.z) + "\n";
    out += "voxel_size: " + detail::fmt_real(spec.voxel_size[0]) + " " +
           detail::fmt_real(spec.voxel_size[1]) + " " + detail::fmt_real(spec.voxel_size[2]) +
           "\n";
    out += "origin: " + detail::fmt_real(spec.origin[0]) + " " +
           detail::fmt_real(spec.origin[1]) + " " + detail::fmt_real(spec.origin[2]) + "\n";
    out += "ground_height: " + std::to_string(spec.ground_height) + "\n";
    out += "ground_label: " + std::to_string(spec.ground_label) + "\n";
    out += "class_count: " + std::to_string(spec.class_count) + "\n";
    for (const BoxSpec& box : spec.boxes) {
        out += "box: " + std::to_string(box.label) + " " + std::to_string(box.min_corner.x) +
               " " + std::to_string(box.min_corner.y) + " " + std::to_string(box.min_corner.z) +
               " " + std::to_string(box.size.x) + " " + std::to_string(box.size.y) + " " +
               std::to_string(box.size.z) + "\n";
    }
    detail::save_bytes_atomic(path, out.data(), out.size());
}

inline SceneSpec read_scene_spec(const std::string& path) {
    const auto data = detail::load_bytes(path);
    const auto lines = detail::split_lines(data);
    detail::LineCursor cur{&lines};
    const detail::TextLine* magic = cur.next();
    if (!magic || magic->text != "OSCN1") {
        throw parse_error(parse_fault::bad_magic, magic ? magic->offset : 0,
                          path + ": expected scene spec magic \"OSCN1\"");
    }
    SceneSpec spec;
    bool have_dims = false;
    const auto parse_u32 = [&](std::string_view token, std::size_t offset, const char* what) {
        const std::uint64_t v = detail::parse_uint(token, offset, what);
        if (v > 0xffffffffull) {
            throw parse_error(parse_fault::bad_value, offset,
                              std::string(what) + " value out of range");
        }
        return static_cast<std::uint32_t>(v);
    };
    while (const detail::TextLine* line = cur.next()) {
        std::string key, rest;
        if (!detail::split_key_line(line->text, key, rest)) {
            throw parse_error(parse_fault::bad_value, line->offset,
                              path + ": expected \"key: values\" line");
        }
        const auto tokens = detail::split_tokens(rest);
        const auto want = [&](std::size_t n) {
            if (tokens.size() != n) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": key \"" + key + "\" needs " + std::to_string(n) +
                                      " values, got " + std::to_string(tokens.size()));
            }
        };
        if (key == "seed") {
            want(1);
            spec.seed = detail::parse_uint(tokens[0], line->offset, "seed");
        } else if (key == "dims") {
            want(3);
            spec.dims = GridDims{parse_u32(tokens[0], line->offset, "dims"),
                                 parse_u32(tokens[1], line->offset, "dims"),
                                 parse_u32(tokens[2], line->offset, "dims")};
            have_dims = true;
        } else if (key == "voxel_size") {
            want(3);
            for (int i = 0; i < 3; ++i) {
                spec.voxel_size[static_cast<std::size_t>(i)] = static_cast<float>(
                    detail::parse_real(tokens[static_cast<std::size_t>(i)], line->offset,
                                       "voxel_size"));
            }
        } else if (key == "origin") {
            want(3);
            for (int i = 0; i < 3; ++i) {
                spec.origin[static_cast<std::size_t>(i)] = static_cast<float>(
                    detail::parse_real(tokens[static_cast<std::size_t>(i)], line->offset,
                                       "origin"));
            }
        } else if (key == "ground_height") {
            want(1);
            spec.ground_height = parse_u32(tokens[0], line->offset, "ground_height");
        } else if (key == "ground_label") {
            want(1);
            const std::uint64_t v = detail::parse_uint(tokens[0], line->offset, "ground_label");
            if (v > 0xffff) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": ground_label exceeds 65535");
            }
            spec.ground_label = static_cast<Label>(v);
        } else if (key == "class_count") {
            want(1);
            spec.class_count = parse_u32(tokens[0], line->offset, "class_count");
        } else if (key == "box") {
            want(7);
            BoxSpec box;
            const std::uint64_t label = detail::parse_uint(tokens[0], line->offset, "box label");
            if (label > 0xffff) {
                throw parse_error(parse_fault::bad_value, line->offset,
                                  path + ": box label exceeds 65535");
            }
            box.label = static_cast<Label>(label);
            box.min_corner = CellCoord{parse_u32(tokens[1], line->offset, "box"),
                                       parse_u32(tokens[2], line->offset, "box"),
                                       parse_u32(tokens[3], line->offset, "box")};
            box.size = GridDims{parse_u32(tokens[4], line->offset, "box"),
                                parse_u32(tokens[5], line->offset, "box"),
                                parse_u32(tokens[6], line->offset, "box")};
            spec.boxes.push_back(box);
        } else {
            throw parse_error(parse_fault::bad_value, line->offset,
                              path + ": unknown scene spec key \"" + key + "\"");
        }
    }
    if (!have_dims) {
        throw parse_error(parse_fault::bad_value, data.size(),
                          path + ": scene spec is missing \"dims\"");
    }
    return spec;
}

// ---- viewer export ---------------------------------------------------------

namespace detail {

template <typename T>
void write_point_list_impl(const std::string& path, const SparseOctreeField<T>& field,
                           const GridGeometry& finest_geom,
                           std::string (*payload_text)(const T&)) {
    if (field.depth < 2) {
        throw config_error("sparse field depth " + std::to_string(field.depth) +
                           " is not exportable");
    }
    const std::uint32_t s = 1u << (field.depth - 1);
    const GridDims finest{field.base_dims.x * s, field.base_dims.y * s, field.base_dims.z * s};
    if (finest != finest_geom.dims) {
        throw dimension_error("export: geometry dims " + finest_geom.dims.to_string() +
                              " do not match the field's finest dims " + finest.to_string());
    }
    std::string out;
    out += "# x y z size label\n";
    for (const auto& leaf : field.leaves) {
        const std::uint32_t scale = 1u << (field.depth - 1 - leaf.level);
        const double sx = static_cast<double>(finest_geom.voxel_size[0]);
        const double cx = finest_geom.origin[0] + (leaf.coord.x + 0.5) * scale * sx;
        const double cy = finest_geom.origin[1] +
                          (leaf.coord.y + 0.5) * scale *
                              static_cast<double>(finest_geom.voxel_size[1]);
        const double cz = finest_geom.origin[2] +
                          (leaf.coord.z + 0.5) * scale *
                              static_cast<double>(finest_geom.voxel_size[2]);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g ", cx, cy, cz, scale * sx);
        out += buf;
        out += payload_text(leaf.payload);
        out += '\n';
    }
    save_bytes_atomic(path, out.data(), out.size());
}

}  // namespace detail

inline void write_point_list(const std::string& path, const SparseOctreeField<Label>& field,
                             const GridGeometry& finest_geom) {
    detail::write_point_list_impl<Label>(path, field, finest_geom, +[](const Label& v) {
        return std::to_string(v);
    });
}

inline void write_point_list(const std::string& path, const SparseOctreeField<float>& field,
                             const GridGeometry& finest_geom) {
    detail::write_point_list_impl<float>(path, field, finest_geom, +[](const float& v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
        return std::string(buf);
    });
}

// ---- provider specs --------------------------------------------------------

// "oracle:<structure path>:<noise rate>" | "const:<value>" | "file:<mask path>".
// The seed feeds the oracle's noise stream.
inline std::unique_ptr<SplitProbabilityProvider> make_provider(const std::string& spec,
                                                               std::uint64_t seed) {
    const std::size_t first = spec.find(':');
    const std::string head = spec.substr(0, first);
    if (head == "const") {
        if (first == std::string::npos) {
            throw config_error("provider spec \"const\" needs a value, e.g. const:0.5");
        }
        const std::string value = spec.substr(first + 1);
        return std::make_unique<ConstantProvider>(
            detail::parse_real(value, 0, "provider constant"));
    }
    if (head == "file") {
        if (first == std::string::npos) {
            throw config_error("provider spec \"file\" needs a path, e.g. file:mask.octs");
        }
        return std::make_unique<MaskProvider>(read_mask(spec.substr(first + 1)));
    }
    if (head == "oracle") {
        const std::size_t last = spec.rfind(':');
        if (first == std::string::npos || last == first) {
            throw config_error(
                "provider spec \"oracle\" needs a path and noise rate, e.g. oracle:gt.octs:0.2");
        }
        const std::string gt_path = spec.substr(first + 1, last - first - 1);
        const double noise = detail::parse_real(spec.substr(last + 1), 0, "oracle noise rate");
        return std::make_unique<OracleProvider>(to_octree_gt(read_structure(gt_path)), noise,
                                                seed);
    }
    throw config_error("unknown provider spec \"" + spec +
                       "\"; use oracle:<path>:<noise>, const:<value>, or file:<path>");
}

}  // namespace octovox
