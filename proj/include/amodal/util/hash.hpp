#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amodal {

/// 64-bit FNV-1a, used as the stable content hash in manifests.
class ContentHasher {
public:
    void update(const void* data, std::size_t len);
    void update(const std::string& s) { update(s.data(), s.size()); }
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string content_hash_hex(const std::string& data);
std::string file_hash_hex(const std::string& path);

}  // namespace amodal
