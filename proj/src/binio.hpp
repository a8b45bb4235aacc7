#pragma once

// Little-endian primitive encoding shared by the realization, dataset and
// checkpoint formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "flexsec/errors.hpp"

namespace flexsec::binio {

template <typename U>
inline void put_le(std::ostream& os, U v) {
    static_assert(std::is_unsigned_v<U>);
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    os.write(bytes.data(), bytes.size());
}

template <typename U>
inline U get_le(std::istream& is, const char* what) {
    static_assert(std::is_unsigned_v<U>);
    std::array<unsigned char, sizeof(U)> bytes{};
    is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (is.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw CorruptFile(std::string("unexpected end of file while reading ") + what);
    }
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        v |= static_cast<U>(bytes[i]) << (8 * i);
    }
    return v;
}

inline void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
inline void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
inline void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(std::istream& is, const char* what) { return get_le<std::uint32_t>(is, what); }
inline std::uint64_t get_u64(std::istream& is, const char* what) { return get_le<std::uint64_t>(is, what); }
inline double get_f64(std::istream& is, const char* what) {
    return std::bit_cast<double>(get_le<std::uint64_t>(is, what));
}

inline void put_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char (&magic)[5], const char* what) {
    char buf[4] = {};
    is.read(buf, 4);
    if (is.gcount() != 4 || std::memcmp(buf, magic, 4) != 0) {
        throw CorruptFile(std::string("bad magic in ") + what);
    }
}

inline void put_string(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& is, const char* what, std::uint32_t max_len = 1u << 16) {
    const auto len = get_u32(is, what);
    if (len > max_len) throw CorruptFile(std::string("implausible string length in ") + what);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (is.gcount() != static_cast<std::streamsize>(len)) {
        throw CorruptFile(std::string("unexpected end of file while reading ") + what);
    }
    return s;
}

}  // namespace flexsec::binio
