#pragma once

// Ternary digit / bit stream containers, the 3-to-2 alphabetic morphism
// (0 -> 0, 1 -> 1, 2 -> 0), and packed on-disk formats.
//
// File formats (little-endian count, bit-exact):
//   ternary  magic "QT3\0", u8 version = 1, u64 digit count, payload of
//            5 digits per byte packed base-243 (first digit most
//            significant); trailing partial group zero-padded; any payload
//            byte > 242 is corruption.
//   bits     magic "QB2\0", u8 version = 1, u64 bit count, payload of
//            8 bits per byte, LSB-first; trailing bits zero-padded.
//
// Readers and writers exist both as whole-buffer pack/unpack (in-memory)
// and as chunked file streams with constant memory use.

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrng {

struct InvalidDigit : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CorruptFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TernaryStream {
    std::vector<std::uint8_t> digits;

    TernaryStream() = default;
    explicit TernaryStream(std::vector<std::uint8_t> d) : digits(std::move(d)) {}

    std::uint64_t size() const { return digits.size(); }
    bool empty() const { return digits.empty(); }
    void push_back(std::uint8_t d) {
        if (d > 2) throw InvalidDigit("TernaryStream: digit out of range");
        digits.push_back(d);
    }
    std::uint8_t operator[](std::size_t i) const { return digits[i]; }
};

struct BitStream {
    std::vector<std::uint8_t> bits;

    BitStream() = default;
    explicit BitStream(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    std::uint64_t size() const { return bits.size(); }
    bool empty() const { return bits.empty(); }
    void push_back(std::uint8_t b) {
        if (b > 1) throw InvalidDigit("BitStream: bit out of range");
        bits.push_back(b);
    }
    std::uint8_t operator[](std::size_t i) const { return bits[i]; }

    bool operator==(const BitStream&) const = default;
};

// The alphabetic morphism: 0 -> 0, 1 -> 1, 2 -> 0.
inline std::uint8_t morphism_digit(std::uint8_t a) {
    if (a > 2) throw InvalidDigit("morphism_digit: digit out of range");
    return a == 1 ? 1 : 0;
}

inline BitStream morphism_stream(const TernaryStream& x) {
    BitStream y;
    y.bits.reserve(x.digits.size());
    for (const std::uint8_t d : x.digits) y.bits.push_back(morphism_digit(d));
    return y;
}

// --- packed formats ---------------------------------------------------------

namespace detail {

inline constexpr std::array<char, 4> kTernaryMagic{'Q', 'T', '3', '\0'};
inline constexpr std::array<char, 4> kBitMagic{'Q', 'B', '2', '\0'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 4 + 1 + 8;

inline void put_header(std::vector<std::uint8_t>& out, const std::array<char, 4>& magic,
                       std::uint64_t count) {
    for (const char c : magic) out.push_back(static_cast<std::uint8_t>(c));
    out.push_back(kFormatVersion);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(count >> (8 * i)));
}

inline std::uint64_t parse_header(std::span<const std::uint8_t> file,
                                  const std::array<char, 4>& magic) {
    if (file.size() < kHeaderSize) throw CorruptFile("packed file: truncated header");
    for (std::size_t i = 0; i < 4; ++i)
        if (file[i] != static_cast<std::uint8_t>(magic[i]))
            throw CorruptFile("packed file: bad magic");
    if (file[4] != kFormatVersion) throw CorruptFile("packed file: unsupported version");
    std::uint64_t count = 0;
    for (int i = 0; i < 8; ++i) count |= static_cast<std::uint64_t>(file[5 + i]) << (8 * i);
    return count;
}

inline std::uint8_t pack_trit_group(std::span<const std::uint8_t> digits) {
    // Up to 5 digits, first digit most significant; missing digits are 0.
    unsigned value = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        const unsigned d = k < digits.size() ? digits[k] : 0u;
        value = value * 3 + d;
    }
    return static_cast<std::uint8_t>(value);
}

inline std::array<std::uint8_t, 5> unpack_trit_group(std::uint8_t byte) {
    if (byte > 242) throw CorruptFile("packed ternary: payload byte exceeds 242");
    std::array<std::uint8_t, 5> digits{};
    unsigned value = byte;
    for (int k = 4; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(value % 3);
        value /= 3;
    }
    return digits;
}

}  // namespace detail

inline std::vector<std::uint8_t> pack_ternary(const TernaryStream& x) {
    for (const auto d : x.digits)
        if (d > 2) throw InvalidDigit("pack_ternary: digit out of range");
    std::vector<std::uint8_t> out;
    out.reserve(detail::kHeaderSize + (x.size() + 4) / 5);
    detail::put_header(out, detail::kTernaryMagic, x.size());
    for (std::size_t i = 0; i < x.digits.size(); i += 5) {
        const std::size_t n = std::min<std::size_t>(5, x.digits.size() - i);
        out.push_back(detail::pack_trit_group({x.digits.data() + i, n}));
    }
    return out;
}

inline TernaryStream unpack_ternary(std::span<const std::uint8_t> file) {
    const std::uint64_t count = detail::parse_header(file, detail::kTernaryMagic);
    const auto payload = file.subspan(detail::kHeaderSize);
    const std::uint64_t expected_bytes = (count + 4) / 5;
    if (payload.size() != expected_bytes)
        throw CorruptFile("packed ternary: payload size inconsistent with digit count");
    TernaryStream x;
    x.digits.reserve(count);
    for (std::uint64_t b = 0; b < expected_bytes; ++b) {
        const auto group = detail::unpack_trit_group(payload[b]);
        const std::uint64_t take = std::min<std::uint64_t>(5, count - 5 * b);
        for (std::uint64_t k = 0; k < take; ++k) x.digits.push_back(group[k]);
    }
    return x;
}

inline std::vector<std::uint8_t> pack_bits(const BitStream& x) {
    for (const auto b : x.bits)
        if (b > 1) throw InvalidDigit("pack_bits: bit out of range");
    std::vector<std::uint8_t> out;
    out.reserve(detail::kHeaderSize + (x.size() + 7) / 8);
    detail::put_header(out, detail::kBitMagic, x.size());
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < x.bits.size(); ++i) {
        acc |= static_cast<std::uint8_t>(x.bits[i] << (i % 8));
        if (i % 8 == 7) {
            out.push_back(acc);
            acc = 0;
        }
    }
    if (x.bits.size() % 8 != 0) out.push_back(acc);
    return out;
}

inline BitStream unpack_bits(std::span<const std::uint8_t> file) {
    const std::uint64_t count = detail::parse_header(file, detail::kBitMagic);
    const auto payload = file.subspan(detail::kHeaderSize);
    const std::uint64_t expected_bytes = (count + 7) / 8;
    if (payload.size() != expected_bytes)
        throw CorruptFile("packed bits: payload size inconsistent with bit count");
    BitStream x;
    x.bits.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
        x.bits.push_back((payload[i / 8] >> (i % 8)) & 1u);
    return x;
}

// --- file helpers -----------------------------------------------------------

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw IoError("read failed: " + path.string());
    return bytes;
}

inline void write_ternary_file(const std::filesystem::path& path, const TernaryStream& x) {
    write_file_bytes(path, pack_ternary(x));
}
inline TernaryStream read_ternary_file(const std::filesystem::path& path) {
    return unpack_ternary(read_file_bytes(path));
}
inline void write_bit_file(const std::filesystem::path& path, const BitStream& x) {
    write_file_bytes(path, pack_bits(x));
}
inline BitStream read_bit_file(const std::filesystem::path& path) {
    return unpack_bits(read_file_bytes(path));
}

// --- chunked file streams ---------------------------------------------------
//
// The element count is part of the header, so writers take it up front and
// verify it on finish(); readers hand out elements in caller-sized chunks.
// Memory use is one element buffer regardless of file size.

class TernaryFileWriter {
public:
    TernaryFileWriter(const std::filesystem::path& path, std::uint64_t count)
        : out_(path, std::ios::binary | std::ios::trunc), remaining_(count) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
        std::vector<std::uint8_t> header;
        detail::put_header(header, detail::kTernaryMagic, count);
        out_.write(reinterpret_cast<const char*>(header.data()),
                   static_cast<std::streamsize>(header.size()));
    }

    void append(std::span<const std::uint8_t> digits) {
        if (digits.size() > remaining_)
            throw std::logic_error("TernaryFileWriter: more digits than declared");
        remaining_ -= digits.size();
        for (const auto d : digits) {
            if (d > 2) throw InvalidDigit("TernaryFileWriter: digit out of range");
            group_[group_fill_++] = d;
            if (group_fill_ == 5) flush_group();
        }
    }

    void finish() {
        if (remaining_ != 0)
            throw std::logic_error("TernaryFileWriter: fewer digits than declared");
        if (group_fill_ > 0) flush_group();
        out_.flush();
        if (!out_) throw IoError("TernaryFileWriter: write failed");
    }

private:
    void flush_group() {
        const std::uint8_t byte = detail::pack_trit_group({group_.data(), group_fill_});
        out_.put(static_cast<char>(byte));
        group_fill_ = 0;
    }

    std::ofstream out_;
    std::uint64_t remaining_;
    std::array<std::uint8_t, 5> group_{};
    std::size_t group_fill_ = 0;
};

class TernaryFileReader {
public:
    explicit TernaryFileReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open for reading: " + path.string());
        std::array<std::uint8_t, detail::kHeaderSize> header{};
        in_.read(reinterpret_cast<char*>(header.data()), header.size());
        if (in_.gcount() != static_cast<std::streamsize>(header.size()))
            throw CorruptFile("packed ternary: truncated header");
        count_ = detail::parse_header(header, detail::kTernaryMagic);
        remaining_ = count_;
    }

    std::uint64_t count() const { return count_; }

    // Fills `out` with up to out.size() digits; returns the number produced
    // (0 at end of stream).
    std::size_t read(std::span<std::uint8_t> out) {
        std::size_t produced = 0;
        while (produced < out.size() && remaining_ > 0) {
            if (group_pos_ == group_len_) {
                const int byte = in_.get();
                if (byte == EOF) throw CorruptFile("packed ternary: truncated payload");
                group_ = detail::unpack_trit_group(static_cast<std::uint8_t>(byte));
                group_pos_ = 0;
                group_len_ = static_cast<std::size_t>(std::min<std::uint64_t>(5, remaining_));
            }
            out[produced++] = group_[group_pos_++];
            --remaining_;
        }
        if (remaining_ == 0 && !exhaust_checked_) {
            exhaust_checked_ = true;
            if (in_.peek() != EOF)
                throw CorruptFile("packed ternary: payload size inconsistent with digit count");
        }
        return produced;
    }

private:
    std::ifstream in_;
    std::uint64_t count_ = 0;
    std::uint64_t remaining_ = 0;
    std::array<std::uint8_t, 5> group_{};
    std::size_t group_pos_ = 0;
    std::size_t group_len_ = 0;
    bool exhaust_checked_ = false;
};

class BitFileWriter {
public:
    BitFileWriter(const std::filesystem::path& path, std::uint64_t count)
        : out_(path, std::ios::binary | std::ios::trunc), remaining_(count) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
        std::vector<std::uint8_t> header;
        detail::put_header(header, detail::kBitMagic, count);
        out_.write(reinterpret_cast<const char*>(header.data()),
                   static_cast<std::streamsize>(header.size()));
    }

    void append(std::span<const std::uint8_t> bits) {
        if (bits.size() > remaining_)
            throw std::logic_error("BitFileWriter: more bits than declared");
        remaining_ -= bits.size();
        for (const auto b : bits) {
            if (b > 1) throw InvalidDigit("BitFileWriter: bit out of range");
            acc_ |= static_cast<std::uint8_t>(b << fill_);
            if (++fill_ == 8) flush_byte();
        }
    }

    void finish() {
        if (remaining_ != 0) throw std::logic_error("BitFileWriter: fewer bits than declared");
        if (fill_ > 0) flush_byte();
        out_.flush();
        if (!out_) throw IoError("BitFileWriter: write failed");
    }

private:
    void flush_byte() {
        out_.put(static_cast<char>(acc_));
        acc_ = 0;
        fill_ = 0;
    }

    std::ofstream out_;
    std::uint64_t remaining_;
    std::uint8_t acc_ = 0;
    unsigned fill_ = 0;
};

class BitFileReader {
public:
    explicit BitFileReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open for reading: " + path.string());
        std::array<std::uint8_t, detail::kHeaderSize> header{};
        in_.read(reinterpret_cast<char*>(header.data()), header.size());
        if (in_.gcount() != static_cast<std::streamsize>(header.size()))
            throw CorruptFile("packed bits: truncated header");
        count_ = detail::parse_header(header, detail::kBitMagic);
        remaining_ = count_;
    }

    std::uint64_t count() const { return count_; }

    std::size_t read(std::span<std::uint8_t> out) {
        std::size_t produced = 0;
        while (produced < out.size() && remaining_ > 0) {
            if (avail_ == 0) {
                const int byte = in_.get();
                if (byte == EOF) throw CorruptFile("packed bits: truncated payload");
                byte_ = static_cast<std::uint8_t>(byte);
                avail_ = 8;
            }
            out[produced++] = (byte_ >> (8 - avail_)) & 1u;
            --avail_;
            --remaining_;
        }
        if (remaining_ == 0 && !exhaust_checked_) {
            exhaust_checked_ = true;
            if (in_.peek() != EOF)
                throw CorruptFile("packed bits: payload size inconsistent with bit count");
        }
        return produced;
    }

private:
    std::ifstream in_;
    std::uint64_t count_ = 0;
    std::uint64_t remaining_ = 0;
    std::uint8_t byte_ = 0;
    unsigned avail_ = 0;
    bool exhaust_checked_ = false;
};

}  // namespace qrng
