#include "med3d/volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "med3d/kernels.hpp"

namespace med3d {

std::string modality_name(Modality m) {
    switch (m) {
        case Modality::CT: return "CT";
        case Modality::MRI: return "MRI";
        case Modality::SYNTH: return "SYNTH";
    }
    return "SYNTH";
}

Modality modality_from_name(const std::string& s) {
    if (s == "CT") return Modality::CT;
    if (s == "MRI") return Modality::MRI;
    if (s == "SYNTH") return Modality::SYNTH;
    throw std::invalid_argument("unknown modality: '" + s + "'");
}

const char* plane_name(int plane) {
    switch (plane) {
        case 0: return "coronal";
        case 1: return "sagittal";
        case 2: return "axial";
    }
    throw std::invalid_argument("plane " + std::to_string(plane) + " out of range [0,3)");
}

void VolumeRecord::validate() const {
    if (voxels.ndim() != 3 || voxels.dim(0) != voxels.dim(1) || voxels.dim(1) != voxels.dim(2))
        throw std::invalid_argument("VolumeRecord '" + id + "': voxels not cubic, shape " +
                                    shape_str(voxels.shape));
    if (spacing_mm <= 0)
        throw std::invalid_argument("VolumeRecord '" + id + "': spacing_mm " +
                                    std::to_string(spacing_mm) + " must be positive");
    for (double v : voxels.data)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("VolumeRecord '" + id + "': voxel value " +
                                        std::to_string(v) + " outside [0,1]");
}

namespace {

void minmax_normalize(Tensor& t) {
    auto [mn_it, mx_it] = std::minmax_element(t.data.begin(), t.data.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx - mn <= 0.0) {
        t.zero();  // constant volume: documented convention, all voxels -> 0
        return;
    }
    const double inv = 1.0 / (mx - mn);
    // clamp: (v-mn)*inv can land one ulp outside [0,1]
    for (double& v : t.data) v = std::clamp((v - mn) * inv, 0.0, 1.0);
}

Tensor resample_axes(const Tensor& in, int d1, int h1, int w1, bool nearest) {
    const int d0 = in.dim(0), h0 = in.dim(1), w0 = in.dim(2);
    if (d0 == d1 && h0 == h1 && w0 == w1) return in;
    Tensor out({d1, h1, w1});
    if (nearest)
        kern::resample3d_nearest(in.data.data(), d0, h0, w0, out.data.data(), d1, h1, w1);
    else
        kern::resample3d(in.data.data(), d0, h0, w0, out.data.data(), d1, h1, w1);
    return out;
}

Tensor pad_to_cube(const Tensor& in) {
    const int d = in.dim(0), h = in.dim(1), w = in.dim(2);
    const int s = std::max({d, h, w});
    if (d == s && h == s && w == s) return in;
    Tensor out({s, s, s});
    const int od = (s - d) / 2, oh = (s - h) / 2, ow = (s - w) / 2;
    for (int z = 0; z < d; ++z)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(z + od, y + oh, x + ow) = in.at(z, y, x);
    return out;
}

void check_raw(const Tensor& raw, double sx, double sy, double sz) {
    if (raw.ndim() != 3)
        throw std::invalid_argument("preprocess: expected 3-D input, got " +
                                    shape_str(raw.shape));
    for (int a = 0; a < 3; ++a)
        if (raw.dim(a) < 2)
            throw std::invalid_argument("preprocess: degenerate extent " +
                                        std::to_string(raw.dim(a)) + " on axis " +
                                        std::to_string(a) + " (need >= 2)");
    if (sx <= 0 || sy <= 0 || sz <= 0)
        throw std::invalid_argument("preprocess: spacing (" + std::to_string(sx) + "," +
                                    std::to_string(sy) + "," + std::to_string(sz) +
                                    ") must be positive");
}

// Extent after resampling to 1.0 mm, never below 2.
int iso_extent(int n, double spacing) {
    return std::max(2, static_cast<int>(std::lround(n * spacing)));
}

}  // namespace

VolumeRecord preprocess_volume(const Tensor& raw, double sx, double sy, double sz, int side,
                               Modality modality, const std::string& id) {
    check_raw(raw, sx, sy, sz);
    if (side < 2)
        throw std::invalid_argument("preprocess: target side " + std::to_string(side) +
                                    " must be >= 2");
    Tensor t = resample_axes(raw, iso_extent(raw.dim(0), sx), iso_extent(raw.dim(1), sy),
                             iso_extent(raw.dim(2), sz), false);
    minmax_normalize(t);
    t = pad_to_cube(t);
    t = resample_axes(t, side, side, side, false);
    minmax_normalize(t);  // exact [0,1] range after interpolation; no-op when untouched
    VolumeRecord rec;
    rec.id = id;
    rec.voxels = std::move(t);
    rec.spacing_mm = 1.0;
    rec.modality = modality;
    return rec;
}

Tensor preprocess_labels(const Tensor& raw, double sx, double sy, double sz, int side) {
    check_raw(raw, sx, sy, sz);
    Tensor t = resample_axes(raw, iso_extent(raw.dim(0), sx), iso_extent(raw.dim(1), sy),
                             iso_extent(raw.dim(2), sz), true);
    t = pad_to_cube(t);
    return resample_axes(t, side, side, side, true);
}

SliceSample extract_slice(const VolumeRecord& v, int plane, int index) {
    const int s = v.side();
    if (plane < 0 || plane >= kNumPlanes)
        throw std::invalid_argument("extract_slice: plane " + std::to_string(plane) +
                                    " out of range [0,3)");
    if (index < 0 || index >= s)
        throw std::invalid_argument("extract_slice: index " + std::to_string(index) +
                                    " out of range [0," + std::to_string(s) + ")");
    SliceSample out;
    out.volume_id = v.id;
    out.plane = plane;
    out.index = index;
    out.pixels = Tensor({s, s});
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
            double val;
            switch (plane) {
                case 0: val = v.voxels.at(index, a, b); break;
                case 1: val = v.voxels.at(a, index, b); break;
                default: val = v.voxels.at(a, b, index); break;
            }
            out.pixels.at(a, b) = val;
        }
    return out;
}

SliceSample sample_slice(const VolumeRecord& v, Rng& rng) {
    const int plane = rng.uniform_int(kNumPlanes);
    const int index = rng.uniform_int(v.side());
    return extract_slice(v, plane, index);
}

}  // namespace med3d
