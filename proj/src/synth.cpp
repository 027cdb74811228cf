#include "med3d/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace med3d {

const char* body_kind_name(BodyKind k) {
    switch (k) {
        case BodyKind::Sphere: return "sphere";
        case BodyKind::Box: return "box";
        case BodyKind::Ellipsoid: return "ellipsoid";
    }
    return "?";
}

IntensityBand body_band(BodyKind k) {
    switch (k) {
        case BodyKind::Sphere: return {0.70, 0.90, 0.80};
        case BodyKind::Box: return {0.60, 0.80, 0.70};
        case BodyKind::Ellipsoid: return {0.50, 0.70, 0.60};
    }
    return {0.5, 0.9, 0.7};
}

namespace {

struct Body {
    BodyKind kind;
    double cx, cy, cz;
    double ax, ay, az;  // sphere: equal radii; box: half extents; ellipsoid: semi-axes
    double intensity;
};

Body draw_body(Rng& rng, int s) {
    Body b;
    b.kind = static_cast<BodyKind>(rng.uniform_int(kNumBodyKinds));
    const double max_half = (s - 4) / 2.0;
    auto extent = [&](double lo_f, double hi_f) {
        return std::clamp(rng.uniform(lo_f, hi_f) * s, 1.2, max_half);
    };
    switch (b.kind) {
        case BodyKind::Sphere: {
            const double r = extent(0.12, 0.20);
            b.ax = b.ay = b.az = r;
            break;
        }
        case BodyKind::Box:
            b.ax = extent(0.10, 0.18);
            b.ay = extent(0.10, 0.18);
            b.az = extent(0.10, 0.18);
            break;
        case BodyKind::Ellipsoid: {
            // keep anisotropy >= 1.5 so the shape reads as non-spherical
            b.ax = extent(0.08, 0.22);
            b.ay = extent(0.08, 0.22);
            b.az = extent(0.08, 0.22);
            const double mx = std::max({b.ax, b.ay, b.az});
            double mn = std::min({b.ax, b.ay, b.az});
            if (mx / mn < 1.5) {
                mn = mx / 1.8;
                if (b.ax <= b.ay && b.ax <= b.az) b.ax = std::max(1.2, mn);
                else if (b.ay <= b.az) b.ay = std::max(1.2, mn);
                else b.az = std::max(1.2, mn);
            }
            break;
        }
    }
    auto center = [&](double half) {
        const double lo = half + 1.0, hi = s - 2.0 - half;
        return hi > lo ? rng.uniform(lo, hi) : s / 2.0;
    };
    b.cx = center(b.ax);
    b.cy = center(b.ay);
    b.cz = center(b.az);
    const IntensityBand band = body_band(b.kind);
    b.intensity = rng.uniform(band.lo, band.hi);
    return b;
}

bool inside(const Body& b, double x, double y, double z) {
    const double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz;
    if (b.kind == BodyKind::Box)
        return std::abs(dx) <= b.ax && std::abs(dy) <= b.ay && std::abs(dz) <= b.az;
    const double q = dx * dx / (b.ax * b.ax) + dy * dy / (b.ay * b.ay) +
                     dz * dz / (b.az * b.az);
    return q <= 1.0;
}

}  // namespace

std::string caption_from_labels(const Tensor& labels, int plane, int index) {
    const int s = labels.dim(0);
    if (plane < 0 || plane >= kNumPlanes)
        throw std::invalid_argument("caption_from_labels: plane " + std::to_string(plane) +
                                    " out of range [0,3)");
    if (index < 0 || index >= s)
        throw std::invalid_argument("caption_from_labels: index " + std::to_string(index) +
                                    " out of range [0," + std::to_string(s) + ")");
    bool present[kNumBodyKinds] = {false, false, false};
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
            double v;
            switch (plane) {
                case 0: v = labels.at(index, a, b); break;
                case 1: v = labels.at(a, index, b); break;
                default: v = labels.at(a, b, index); break;
            }
            const int lab = static_cast<int>(v);
            if (lab >= 1 && lab <= kNumBodyKinds) present[lab - 1] = true;
        }
    std::vector<std::string> parts;
    for (int k = 0; k < kNumBodyKinds; ++k)
        if (present[k])
            parts.push_back(std::string("a ") + body_kind_name(static_cast<BodyKind>(k)));
    std::string what;
    if (parts.empty()) {
        what = "background";
    } else {
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i > 0) what += (i + 1 == parts.size()) ? " and " : ", ";
            what += parts[i];
        }
    }
    return "slice " + std::to_string(index) + " of plane " + plane_name(plane) +
           " showing " + what;
}

CaptionRecord make_template_caption(const std::string& volume_id, const Tensor& labels,
                                    int plane, int index) {
    CaptionRecord rec;
    rec.volume_id = volume_id;
    rec.plane = plane;
    rec.index = index;
    rec.text = caption_from_labels(labels, plane, index);
    return rec;
}

SynthDataset generate_synthetic_dataset(int n, int side, uint64_t seed, bool with_captions) {
    if (n < 1) throw std::invalid_argument("generate_synthetic_dataset: n must be >= 1, got " +
                                           std::to_string(n));
    if (side < 8)
        throw std::invalid_argument("generate_synthetic_dataset: side must be >= 8, got " +
                                    std::to_string(side));
    SynthDataset ds;
    ds.items.reserve(static_cast<size_t>(n));
    Rng master(seed);
    for (int i = 0; i < n; ++i) {
        Rng rng = master.fork(static_cast<uint64_t>(i));
        SynthVolume sv;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "synth-%04d", i);
        sv.volume.id = idbuf;
        sv.volume.modality = Modality::SYNTH;
        sv.volume.spacing_mm = 1.0;
        sv.volume.voxels = Tensor({side, side, side});
        sv.labels = Tensor({side, side, side});
        for (double& v : sv.volume.voxels.data) v = rng.uniform(0.0, kBackgroundMax);

        const int bodies = 1 + rng.uniform_int(3);
        for (int bi = 0; bi < bodies; ++bi) {
            const Body b = draw_body(rng, side);
            if (b.kind == BodyKind::Sphere) sv.class_label = 1;
            const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - b.ax)));
            const int x1 = std::min(side - 1, static_cast<int>(std::ceil(b.cx + b.ax)));
            const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - b.ay)));
            const int y1 = std::min(side - 1, static_cast<int>(std::ceil(b.cy + b.ay)));
            const int z0 = std::max(0, static_cast<int>(std::floor(b.cz - b.az)));
            const int z1 = std::min(side - 1, static_cast<int>(std::ceil(b.cz + b.az)));
            for (int x = x0; x <= x1; ++x)
                for (int y = y0; y <= y1; ++y)
                    for (int z = z0; z <= z1; ++z)
                        if (inside(b, x, y, z)) {
                            const double jitter = rng.uniform(-0.04, 0.04);
                            sv.volume.voxels.at(x, y, z) =
                                std::clamp(b.intensity + jitter, 0.0, 1.0);
                            sv.labels.at(x, y, z) = static_cast<int>(b.kind) + 1;
                        }
        }
        if (with_captions)
            for (int p = 0; p < kNumPlanes; ++p)
                for (int j = 0; j < side; ++j)
                    ds.captions.push_back(make_template_caption(sv.volume.id, sv.labels, p, j));
        ds.items.push_back(std::move(sv));
    }
    return ds;
}

}  // namespace med3d
