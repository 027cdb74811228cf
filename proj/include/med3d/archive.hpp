#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "med3d/tensor.hpp"

namespace med3d {

// Named-tensor container with a JSON meta section. On disk:
//   "M3DARCH1" | u64 header length | header JSON | float64 payload (LE).
// Tensor names are stable public API; loads are bit-exact.
class TensorArchive {
public:
    void put(const std::string& name, const Tensor& t);
    const Tensor& get(const std::string& name) const;
    bool has(const std::string& name) const { return tensors_.count(name) > 0; }
    std::vector<std::string> names() const;

    nlohmann::json meta;

    void save(const std::string& path) const;
    static TensorArchive load(const std::string& path);

private:
    std::map<std::string, Tensor> tensors_;
};

// FNV-1a over raw bytes; stable across runs and platforms of equal endianness.
uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull);
std::string digest_hex(uint64_t h);

}  // namespace med3d
