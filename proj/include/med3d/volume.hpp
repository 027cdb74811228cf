#pragma once

#include <string>

#include "med3d/rng.hpp"
#include "med3d/tensor.hpp"

namespace med3d {

enum class Modality { CT, MRI, SYNTH };

std::string modality_name(Modality m);
Modality modality_from_name(const std::string& s);

// Plane indices bind to array axes: 0 = coronal (axis 0), 1 = sagittal
// (axis 1), 2 = axial (axis 2).
constexpr int kNumPlanes = 3;
const char* plane_name(int plane);

// A preprocessed cubic volume: values in [0,1], isotropic spacing.
struct VolumeRecord {
    std::string id;
    Tensor voxels;  // [S,S,S]
    double spacing_mm = 1.0;
    Modality modality = Modality::SYNTH;

    int side() const { return voxels.ndim() == 3 ? voxels.dim(0) : 0; }
    void validate() const;  // throws if an invariant is broken
};

struct SliceSample {
    std::string volume_id;
    int plane = 0;
    int index = 0;
    Tensor pixels;  // [S,S]
};

struct CaptionRecord {
    std::string volume_id;
    int plane = 0;
    int index = 0;
    std::string text;
};

// Resample to isotropic 1.0 mm (trilinear), min-max normalize to [0,1],
// zero-pad to a cube, rescale to side S, then re-apply min-max so the
// output range is exact. Constant inputs map to all zeros.
VolumeRecord preprocess_volume(const Tensor& raw, double sx, double sy, double sz, int side,
                               Modality modality = Modality::SYNTH,
                               const std::string& id = "");

// Nearest-neighbor pipeline for integer label volumes: resample to 1.0 mm,
// zero-pad to a cube, rescale to side S. No intensity normalization.
Tensor preprocess_labels(const Tensor& raw, double sx, double sy, double sz, int side);

SliceSample extract_slice(const VolumeRecord& v, int plane, int index);

// Uniform plane in {0,1,2} then uniform index in [0,S); draw order is fixed
// so a given seed always yields the same (plane, index).
SliceSample sample_slice(const VolumeRecord& v, Rng& rng);

}  // namespace med3d
