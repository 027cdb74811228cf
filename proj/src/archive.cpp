#include "med3d/archive.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

using nlohmann::json;

namespace med3d {

static_assert(sizeof(double) == 8);

void TensorArchive::put(const std::string& name, const Tensor& t) { tensors_[name] = t; }

const Tensor& TensorArchive::get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
        throw std::runtime_error("archive: missing tensor '" + name + "'");
    return it->second;
}

std::vector<std::string> TensorArchive::names() const {
    std::vector<std::string> out;
    out.reserve(tensors_.size());
    for (const auto& [k, v] : tensors_) out.push_back(k);
    return out;
}

void TensorArchive::save(const std::string& path) const {
    json header;
    header["meta"] = meta;
    json tlist = json::array();
    uint64_t offset = 0;
    for (const auto& [name, t] : tensors_) {
        json e;
        e["name"] = name;
        e["shape"] = t.shape;
        e["offset"] = offset;
        tlist.push_back(e);
        offset += static_cast<uint64_t>(t.numel());
    }
    header["tensors"] = tlist;
    const std::string hs = header.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("archive: cannot write " + path);
    f.write("M3DARCH1", 8);
    const uint64_t hlen = hs.size();
    f.write(reinterpret_cast<const char*>(&hlen), 8);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& [name, t] : tensors_)
        f.write(reinterpret_cast<const char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!f) throw std::runtime_error("archive: write failed for " + path);
}

TensorArchive TensorArchive::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("archive: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (f.gcount() != 8 || std::memcmp(magic, "M3DARCH1", 8) != 0)
        throw std::runtime_error("archive: bad magic in " + path);
    uint64_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), 8);
    std::string hs(hlen, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(hlen));
    if (f.gcount() != static_cast<std::streamsize>(hlen))
        throw std::runtime_error("archive: truncated header in " + path);
    json header = json::parse(hs);

    TensorArchive arch;
    arch.meta = header.value("meta", json::object());
    for (const auto& e : header.at("tensors")) {
        const std::string name = e.at("name").get<std::string>();
        const std::vector<int> shape = e.at("shape").get<std::vector<int>>();
        Tensor t(shape);
        f.read(reinterpret_cast<char*>(t.data.data()),
               static_cast<std::streamsize>(t.data.size() * sizeof(double)));
        if (f.gcount() != static_cast<std::streamsize>(t.data.size() * sizeof(double)))
            throw std::runtime_error("archive: truncated payload for '" + name + "' in " + path);
        arch.tensors_[name] = std::move(t);
    }
    return arch;
}

uint64_t fnv1a64(const void* data, size_t n, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string digest_hex(uint64_t h) {
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace med3d
