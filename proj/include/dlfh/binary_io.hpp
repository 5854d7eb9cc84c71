#ifndef DLFH_BINARY_IO_HPP
#define DLFH_BINARY_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "dlfh/common.hpp"

// Little-endian primitives for the DLFX / DLFC / DLFM container formats.
// Bytes are assembled explicitly so files are identical on any host.

namespace dlfh::detail {

inline void write_bytes_le(std::ostream &out, std::uint64_t v, int nbytes) {
    char buf[8];
    for (int b = 0; b < nbytes; ++b)
        buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
    out.write(buf, nbytes);
}

inline std::uint64_t read_bytes_le(std::istream &in, int nbytes,
                                   const std::string &what) {
    char buf[8];
    in.read(buf, nbytes);
    if (!in) throw LoadError("truncated file while reading " + what);
    std::uint64_t v = 0;
    for (int b = 0; b < nbytes; ++b)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b]))
             << (8 * b);
    return v;
}

inline void write_u16(std::ostream &o, std::uint16_t v) { write_bytes_le(o, v, 2); }
inline void write_u32(std::ostream &o, std::uint32_t v) { write_bytes_le(o, v, 4); }
inline void write_u64(std::ostream &o, std::uint64_t v) { write_bytes_le(o, v, 8); }
inline void write_u8(std::ostream &o, std::uint8_t v) { write_bytes_le(o, v, 1); }

inline std::uint16_t read_u16(std::istream &i, const std::string &w) {
    return static_cast<std::uint16_t>(read_bytes_le(i, 2, w));
}
inline std::uint32_t read_u32(std::istream &i, const std::string &w) {
    return static_cast<std::uint32_t>(read_bytes_le(i, 4, w));
}
inline std::uint64_t read_u64(std::istream &i, const std::string &w) {
    return read_bytes_le(i, 8, w);
}
inline std::uint8_t read_u8(std::istream &i, const std::string &w) {
    return static_cast<std::uint8_t>(read_bytes_le(i, 1, w));
}

inline void write_f32(std::ostream &o, float v) {
    write_u32(o, std::bit_cast<std::uint32_t>(v));
}
inline void write_f64(std::ostream &o, double v) {
    write_u64(o, std::bit_cast<std::uint64_t>(v));
}
inline float read_f32(std::istream &i, const std::string &w) {
    return std::bit_cast<float>(read_u32(i, w));
}
inline double read_f64(std::istream &i, const std::string &w) {
    return std::bit_cast<double>(read_u64(i, w));
}

inline void write_magic(std::ostream &o, const char magic[5]) {
    o.write(magic, 4);
}

inline void expect_magic(std::istream &i, const char magic[5],
                         const std::string &path) {
    char buf[4];
    i.read(buf, 4);
    if (!i || std::memcmp(buf, magic, 4) != 0)
        throw LoadError(path + ": bad magic, expected \"" +
                        std::string(magic, 4) + "\"");
}

}  // namespace dlfh::detail

#endif  // DLFH_BINARY_IO_HPP
