#pragma once

#include "gpc/linalg.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gpc {

/// 64-bit FNV-1a over a sequence of typed fields. Doubles hash by bit
/// pattern, so equal digests mean bit-identical inputs.
class Digest {
public:
    Digest& bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < n; ++k) {
            h_ ^= p[k];
            h_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Digest& add(std::string_view s) {
        add(static_cast<std::uint64_t>(s.size()));
        return bytes(s.data(), s.size());
    }
    Digest& add(std::uint64_t v) { return bytes(&v, sizeof v); }
    Digest& add(std::int64_t v) { return add(static_cast<std::uint64_t>(v)); }
    Digest& add(int v) { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
    Digest& add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }
    Digest& add(const std::vector<double>& v) {
        add(static_cast<std::uint64_t>(v.size()));
        for (double x : v) add(x);
        return *this;
    }
    Digest& add(const Mat& m) {
        add(static_cast<std::int64_t>(m.rows())).add(static_cast<std::int64_t>(m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) add(m(r, c));
        return *this;
    }

    std::uint64_t value() const { return h_; }
    std::string hex() const {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string s(16, '0');
        for (int k = 0; k < 16; ++k) s[static_cast<size_t>(15 - k)] = kHex[(h_ >> (4 * k)) & 0xf];
        return s;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace gpc
