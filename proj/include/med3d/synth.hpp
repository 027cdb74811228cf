#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "med3d/volume.hpp"

namespace med3d {

enum class BodyKind { Sphere = 0, Box = 1, Ellipsoid = 2 };
constexpr int kNumBodyKinds = 3;
const char* body_kind_name(BodyKind k);

// Intensity vocabulary shared by the generator, the template captioner, and
// the mock embedders. Bands overlap on purpose: intensity alone narrows a
// body's kind down but does not decide it, so shape still matters.
struct IntensityBand {
    double lo, hi, center;
};
IntensityBand body_band(BodyKind k);
constexpr double kBackgroundMax = 0.30;

struct SynthVolume {
    VolumeRecord volume;
    Tensor labels;       // [S,S,S], 0 = background, kind+1 otherwise
    int class_label = 0; // 1 iff a sphere is present
};

struct SynthDataset {
    std::vector<SynthVolume> items;
    std::vector<CaptionRecord> captions;  // every (plane, index) of every volume
};

// Each volume holds 1-3 randomized bodies over uniform background noise.
// Same (n, side, seed) reproduces the dataset bit-exactly.
SynthDataset generate_synthetic_dataset(int n, int side, uint64_t seed,
                                        bool with_captions = true);

// "slice <j> of plane <name> showing <bodies|background>", kinds listed in
// fixed order (sphere, box, ellipsoid).
std::string caption_from_labels(const Tensor& labels, int plane, int index);
CaptionRecord make_template_caption(const std::string& volume_id, const Tensor& labels,
                                    int plane, int index);

}  // namespace med3d
