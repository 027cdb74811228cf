#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "med3d/tensor.hpp"
#include "med3d/volume.hpp"

namespace med3d {

struct EmbedderSpec {
    int embed_dim = 512;
    int image_input_side = 64;
    bool frozen = true;  // always; kept explicit because downstream code asserts it
};

struct FrozenWeightsFingerprint {
    std::string digest;
    bool operator==(const FrozenWeightsFingerprint& o) const { return digest == o.digest; }
    bool operator!=(const FrozenWeightsFingerprint& o) const { return digest != o.digest; }
};

// Frozen dual encoder mapping slices and captions into one unit-norm
// d-dimensional space. The first 8 coordinates are shared semantic channels
// (body kinds, planes, slice index) computed from pixels on the image side
// and from vocabulary tokens on the text side; the rest is a fixed seeded
// random map over downsampled pixels / character trigram counts with a tanh
// nonlinearity. Matched slice-caption pairs correlate through the shared
// channels, which is what makes the alignment objective learnable on
// synthetic data.
class DualEncoder {
public:
    static constexpr int kSemChannels = 8;
    static constexpr int kImgPool = 8;    // downsample grid
    static constexpr int kImgBins = 16;   // intensity histogram
    static constexpr int kTxtGrams = 64;  // hashed trigram buckets

    // Mock construction: weights drawn from `seed`.
    DualEncoder(const EmbedderSpec& spec, uint64_t seed);
    // Adapter: named weights from a tensor archive (see save_weights).
    explicit DualEncoder(const std::string& weights_path);

    const EmbedderSpec& spec() const { return spec_; }

    std::vector<double> embed_image(const SliceSample& slice) const;
    std::vector<double> embed_text(const CaptionRecord& caption) const;

    FrozenWeightsFingerprint fingerprint() const;
    void save_weights(const std::string& path) const;

private:
    void init_check() const;
    EmbedderSpec spec_;
    Tensor w_img_;  // [d-8, 64+16]
    Tensor w_txt_;  // [d-8, 64]
};

class CaptionProvider {
public:
    virtual ~CaptionProvider() = default;
    virtual CaptionRecord provide(const SliceSample& slice) = 0;
};

// Derives text from synthetic ground-truth label volumes.
class TemplateCaptionProvider : public CaptionProvider {
public:
    void add_labels(const std::string& volume_id, std::shared_ptr<const Tensor> labels);
    CaptionRecord provide(const SliceSample& slice) override;

private:
    std::unordered_map<std::string, std::shared_ptr<const Tensor>> labels_;
};

// Looks up precomputed captions; a miss is an error, never a fallback.
class ManifestCaptionProvider : public CaptionProvider {
public:
    explicit ManifestCaptionProvider(const std::vector<CaptionRecord>& records);
    explicit ManifestCaptionProvider(const std::string& manifest_path);
    CaptionRecord provide(const SliceSample& slice) override;

private:
    std::unordered_map<std::string, std::string> texts_;
};

// POSTs {image: base64 PNG, prompt} to `endpoint` and expects {text}.
// Retries with exponential backoff, then fails with the last status.
struct ExternalCaptionConfig {
    std::string endpoint;      // e.g. http://host:port/caption
    std::string auth_token;    // sent as Authorization: Bearer <token>
    std::string prompt = "Describe this medical image slice.";
    int max_retries = 3;
    int initial_backoff_ms = 100;
    int timeout_sec = 10;
    int concurrency_cap = 1;
    // Reads CAPTION_ENDPOINT / CAPTION_TOKEN.
    static ExternalCaptionConfig from_env();
};

class ExternalCaptionProvider : public CaptionProvider {
public:
    explicit ExternalCaptionProvider(ExternalCaptionConfig cfg);
    ~ExternalCaptionProvider() override;
    CaptionRecord provide(const SliceSample& slice) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// 8-bit grayscale PNG encoding of a [h,w] tensor with values in [0,1].
std::string encode_png_gray8(const Tensor& pixels);
std::string base64_encode(const std::string& bytes);

}  // namespace med3d
