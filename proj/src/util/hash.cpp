#include "amodal/util/hash.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace amodal {

void ContentHasher::update(const void* data, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        state_ ^= p[i];
        state_ *= 0x100000001b3ull;
    }
}

std::string ContentHasher::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(state_));
    return std::string(buf);
}

std::string content_hash_hex(const std::string& data) {
    ContentHasher h;
    h.update(data);
    return h.hex();
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_hash_hex: cannot open " + path);
    ContentHasher h;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h.update(buf, static_cast<std::size_t>(in.gcount()));
        if (!in) break;
    }
    return h.hex();
}

}  // namespace amodal
