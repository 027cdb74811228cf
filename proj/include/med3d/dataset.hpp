#pragma once

#include <optional>
#include <string>
#include <vector>

#include "med3d/synth.hpp"
#include "med3d/volume.hpp"

namespace med3d {

struct ManifestEntry {
    std::string volume_path;
    std::string label_path;              // empty = no labels
    std::optional<int> class_label;
    std::string split = "train";         // train | val | test
    std::optional<Modality> modality;    // raw sidecar wins when present
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    static DatasetManifest load(const std::string& path);  // JSON-lines
    void save(const std::string& path) const;
};

// 7:1:2 split sizes by largest remainder; counts sum to n and each is within
// one of the exact quota.
void split_counts(int n, int& train, int& val, int& test);
// Shuffled assignment (0=train, 1=val, 2=test) drawn from rng.
std::vector<int> split_assignment(int n, Rng& rng);

// Little-endian float32 volume + JSON sidecar {shape, spacing, modality}.
// Sidecar path = volume path with extension replaced by ".json".
void write_raw_volume(const std::string& path, const Tensor& voxels, double sx, double sy,
                      double sz, Modality modality);
struct RawVolume {
    Tensor voxels;
    double sx = 1, sy = 1, sz = 1;
    Modality modality = Modality::CT;
};
RawVolume read_raw_volume(const std::string& path);

// Minimal NIfTI-1 support (.nii and .nii.gz), common scalar dtypes, with
// scl_slope/scl_inter applied. Tensor axis order is (x, y, z).
RawVolume read_nifti(const std::string& path);
void write_nifti(const std::string& path, const Tensor& voxels, double sx, double sy,
                 double sz);

// Dispatches on extension (.nii/.nii.gz vs .raw).
RawVolume read_volume_file(const std::string& path);

std::vector<CaptionRecord> load_caption_manifest(const std::string& path);
void save_caption_manifest(const std::string& path, const std::vector<CaptionRecord>& caps);

struct LoadedVolume {
    VolumeRecord volume;
    Tensor labels;  // empty tensor when the entry has no labels
    std::optional<int> class_label;
    std::string split;
};

struct LoadSummary {
    int total = 0, loaded = 0, skipped = 0;
    std::vector<std::string> diagnostics;
    std::string to_string() const;
};

// Loads every manifest entry through preprocess_volume (labels through the
// nearest-neighbor pipeline). Unreadable or inconsistent entries are skipped
// with a diagnostic; workers > 1 preprocesses entries in parallel with
// unchanged results.
std::vector<LoadedVolume> load_dataset(const std::string& manifest_path, int side,
                                       LoadSummary* summary = nullptr, int workers = 0);

// Writes a synthetic dataset to dir: volumes/, labels/, captions.jsonl,
// manifest.jsonl with a seeded 7:1:2 split. Deterministic in all arguments.
void write_synth_dataset(const SynthDataset& ds, const std::string& dir, uint64_t seed);

}  // namespace med3d
