#include "med3d/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace med3d {

static_assert(sizeof(float) == 4, "raw volume format requires 32-bit float");

namespace {

std::string sidecar_path(const std::string& raw_path) {
    fs::path p(raw_path);
    p.replace_extension(".json");
    return p.string();
}

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::vector<char> read_file_maybe_gz(const std::string& path) {
    if (ends_with(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (!f) throw std::runtime_error("cannot open gz file: " + path);
        std::vector<char> out;
        char buf[1 << 16];
        int n;
        while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
        const bool bad = n < 0;
        gzclose(f);
        if (bad) throw std::runtime_error("gz read error in: " + path);
        return out;
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return std::vector<char>(std::istreambuf_iterator<char>(f), {});
}

template <typename T>
T read_at(const std::vector<char>& buf, size_t off) {
    if (off + sizeof(T) > buf.size())
        throw std::runtime_error("file truncated (need offset " + std::to_string(off) + ")");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    return v;
}

}  // namespace

void split_counts(int n, int& train, int& val, int& test) {
    const double quota[3] = {0.7 * n, 0.1 * n, 0.2 * n};
    int c[3];
    double rem[3];
    int used = 0;
    for (int i = 0; i < 3; ++i) {
        c[i] = static_cast<int>(std::floor(quota[i]));
        rem[i] = quota[i] - c[i];
        used += c[i];
    }
    // hand out leftovers by largest remainder; ties go train > val > test
    for (int left = n - used; left > 0; --left) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (rem[i] > rem[best] + 1e-12) best = i;
        ++c[best];
        rem[best] = -1;
    }
    train = c[0];
    val = c[1];
    test = c[2];
}

std::vector<int> split_assignment(int n, Rng& rng) {
    int tr, va, te;
    split_counts(n, tr, va, te);
    std::vector<int> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = i < tr ? 0 : (i < tr + va ? 1 : 2);
    // Fisher-Yates with our deterministic rng
    for (int i = n - 1; i > 0; --i) std::swap(out[i], out[rng.uniform_int(i + 1)]);
    return out;
}

DatasetManifest DatasetManifest::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open manifest: " + path);
    DatasetManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("manifest " + path + " line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
        ManifestEntry e;
        e.volume_path = j.at("volume_path").get<std::string>();
        if (j.contains("label_path") && !j["label_path"].is_null())
            e.label_path = j["label_path"].get<std::string>();
        if (j.contains("class_label") && !j["class_label"].is_null())
            e.class_label = j["class_label"].get<int>();
        e.split = j.value("split", "train");
        if (e.split != "train" && e.split != "val" && e.split != "test")
            throw std::runtime_error("manifest " + path + " line " + std::to_string(lineno) +
                                     ": unknown split '" + e.split + "'");
        if (j.contains("modality") && !j["modality"].is_null())
            e.modality = modality_from_name(j["modality"].get<std::string>());
        m.entries.push_back(std::move(e));
    }
    return m;
}

void DatasetManifest::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest: " + path);
    for (const auto& e : entries) {
        json j;
        j["volume_path"] = e.volume_path;
        if (!e.label_path.empty()) j["label_path"] = e.label_path;
        if (e.class_label) j["class_label"] = *e.class_label;
        j["split"] = e.split;
        if (e.modality) j["modality"] = modality_name(*e.modality);
        f << j.dump() << "\n";
    }
}

void write_raw_volume(const std::string& path, const Tensor& voxels, double sx, double sy,
                      double sz, Modality modality) {
    if (voxels.ndim() != 3)
        throw std::invalid_argument("write_raw_volume: expected 3-D tensor");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write: " + path);
    std::vector<float> buf(voxels.data.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(voxels.data[i]);
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    json j;
    j["shape"] = {voxels.dim(0), voxels.dim(1), voxels.dim(2)};
    j["spacing"] = {sx, sy, sz};
    j["modality"] = modality_name(modality);
    std::ofstream side(sidecar_path(path));
    if (!side) throw std::runtime_error("cannot write sidecar for: " + path);
    side << j.dump(2) << "\n";
}

RawVolume read_raw_volume(const std::string& path) {
    std::ifstream side(sidecar_path(path));
    if (!side) throw std::runtime_error("missing sidecar: " + sidecar_path(path));
    json j;
    side >> j;
    const auto shape = j.at("shape").get<std::vector<int>>();
    if (shape.size() != 3) throw std::runtime_error("sidecar shape must have 3 extents: " + path);
    const auto spacing = j.at("spacing").get<std::vector<double>>();
    if (spacing.size() != 3)
        throw std::runtime_error("sidecar spacing must have 3 components: " + path);
    RawVolume out;
    out.sx = spacing[0];
    out.sy = spacing[1];
    out.sz = spacing[2];
    out.modality = modality_from_name(j.value("modality", "CT"));
    const long n = static_cast<long>(shape[0]) * shape[1] * shape[2];
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open raw volume: " + path);
    std::vector<float> buf(static_cast<size_t>(n));
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (f.gcount() != static_cast<std::streamsize>(n * sizeof(float)))
        throw std::runtime_error("raw volume " + path + ": expected " + std::to_string(n) +
                                 " float32 values");
    out.voxels = Tensor({shape[0], shape[1], shape[2]});
    for (long i = 0; i < n; ++i) out.voxels.data[static_cast<size_t>(i)] = buf[static_cast<size_t>(i)];
    return out;
}

RawVolume read_nifti(const std::string& path) {
    const std::vector<char> buf = read_file_maybe_gz(path);
    if (buf.size() < 352) throw std::runtime_error("NIfTI file too small: " + path);
    const int32_t sizeof_hdr = read_at<int32_t>(buf, 0);
    if (sizeof_hdr != 348)
        throw std::runtime_error("NIfTI " + path + ": unsupported header size " +
                                 std::to_string(sizeof_hdr));
    const char* magic = buf.data() + 344;
    if (std::strncmp(magic, "n+1", 3) != 0 && std::strncmp(magic, "ni1", 3) != 0)
        throw std::runtime_error("NIfTI " + path + ": bad magic");
    int16_t dim[8];
    std::memcpy(dim, buf.data() + 40, sizeof(dim));
    if (dim[0] < 3)
        throw std::runtime_error("NIfTI " + path + ": need 3 spatial dims, header says " +
                                 std::to_string(dim[0]));
    for (int i = 4; i <= dim[0]; ++i)
        if (dim[i] > 1)
            throw std::runtime_error("NIfTI " + path + ": non-singleton dim " +
                                     std::to_string(i) + " unsupported");
    const int nx = dim[1], ny = dim[2], nz = dim[3];
    const int16_t datatype = read_at<int16_t>(buf, 70);
    float pixdim[8];
    std::memcpy(pixdim, buf.data() + 76, sizeof(pixdim));
    const float vox_offset = read_at<float>(buf, 108);
    float slope = read_at<float>(buf, 112);
    const float inter = read_at<float>(buf, 116);
    if (slope == 0.0f) slope = 1.0f;

    const size_t off = static_cast<size_t>(vox_offset);
    const long n = static_cast<long>(nx) * ny * nz;
    RawVolume out;
    out.sx = pixdim[1] > 0 ? pixdim[1] : 1.0;
    out.sy = pixdim[2] > 0 ? pixdim[2] : 1.0;
    out.sz = pixdim[3] > 0 ? pixdim[3] : 1.0;
    out.modality = Modality::CT;
    out.voxels = Tensor({nx, ny, nz});

    auto fill = [&](auto reader, size_t elem) {
        if (off + static_cast<size_t>(n) * elem > buf.size())
            throw std::runtime_error("NIfTI " + path + ": data section truncated");
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) {
                    const size_t idx = static_cast<size_t>(x) +
                                       static_cast<size_t>(y) * nx +
                                       static_cast<size_t>(z) * nx * ny;
                    out.voxels.at(x, y, z) =
                        slope * reader(buf, off + idx * elem) + inter;
                }
    };
    switch (datatype) {
        case 2: fill([](const std::vector<char>& b, size_t o) { return static_cast<double>(read_at<uint8_t>(b, o)); }, 1); break;
        case 4: fill([](const std::vector<char>& b, size_t o) { return static_cast<double>(read_at<int16_t>(b, o)); }, 2); break;
        case 8: fill([](const std::vector<char>& b, size_t o) { return static_cast<double>(read_at<int32_t>(b, o)); }, 4); break;
        case 16: fill([](const std::vector<char>& b, size_t o) { return static_cast<double>(read_at<float>(b, o)); }, 4); break;
        case 64: fill([](const std::vector<char>& b, size_t o) { return read_at<double>(b, o); }, 8); break;
        case 512: fill([](const std::vector<char>& b, size_t o) { return static_cast<double>(read_at<uint16_t>(b, o)); }, 2); break;
        default:
            throw std::runtime_error("NIfTI " + path + ": unsupported datatype code " +
                                     std::to_string(datatype));
    }
    return out;
}

void write_nifti(const std::string& path, const Tensor& voxels, double sx, double sy,
                 double sz) {
    if (voxels.ndim() != 3) throw std::invalid_argument("write_nifti: expected 3-D tensor");
    std::vector<char> hdr(352, 0);
    auto put = [&](size_t off, const void* p, size_t n) { std::memcpy(hdr.data() + off, p, n); };
    const int32_t sz348 = 348;
    put(0, &sz348, 4);
    int16_t dim[8] = {3, static_cast<int16_t>(voxels.dim(0)), static_cast<int16_t>(voxels.dim(1)),
                      static_cast<int16_t>(voxels.dim(2)), 1, 1, 1, 1};
    put(40, dim, sizeof(dim));
    const int16_t datatype = 16, bitpix = 32;
    put(70, &datatype, 2);
    put(72, &bitpix, 2);
    float pixdim[8] = {1.f, static_cast<float>(sx), static_cast<float>(sy),
                       static_cast<float>(sz), 0.f, 0.f, 0.f, 0.f};
    put(76, pixdim, sizeof(pixdim));
    const float vox_offset = 352.f, slope = 1.f, inter = 0.f;
    put(108, &vox_offset, 4);
    put(112, &slope, 4);
    put(116, &inter, 4);
    put(344, "n+1\0", 4);

    const int nx = voxels.dim(0), ny = voxels.dim(1), nz = voxels.dim(2);
    std::vector<float> data(static_cast<size_t>(nx) * ny * nz);
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x)
                data[static_cast<size_t>(x) + static_cast<size_t>(y) * nx +
                     static_cast<size_t>(z) * nx * ny] = static_cast<float>(voxels.at(x, y, z));

    if (ends_with(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("cannot write: " + path);
        gzwrite(f, hdr.data(), static_cast<unsigned>(hdr.size()));
        gzwrite(f, data.data(), static_cast<unsigned>(data.size() * sizeof(float)));
        gzclose(f);
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write: " + path);
        f.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
        f.write(reinterpret_cast<const char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
}

RawVolume read_volume_file(const std::string& path) {
    if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) return read_nifti(path);
    if (ends_with(path, ".raw")) return read_raw_volume(path);
    throw std::runtime_error("unrecognized volume format (expect .nii, .nii.gz or .raw): " +
                             path);
}

std::vector<CaptionRecord> load_caption_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open caption manifest: " + path);
    std::vector<CaptionRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        CaptionRecord c;
        c.volume_id = j.at("volume_id").get<std::string>();
        c.plane = j.at("plane").get<int>();
        c.index = j.at("index").get<int>();
        c.text = j.at("text").get<std::string>();
        out.push_back(std::move(c));
    }
    return out;
}

void save_caption_manifest(const std::string& path, const std::vector<CaptionRecord>& caps) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write caption manifest: " + path);
    for (const auto& c : caps) {
        json j;
        j["volume_id"] = c.volume_id;
        j["plane"] = c.plane;
        j["index"] = c.index;
        j["text"] = c.text;
        f << j.dump() << "\n";
    }
}

std::string LoadSummary::to_string() const {
    std::string s = "loaded " + std::to_string(loaded) + "/" + std::to_string(total) +
                    " volumes, skipped " + std::to_string(skipped);
    for (const auto& d : diagnostics) s += "\n  " + d;
    return s;
}

std::vector<LoadedVolume> load_dataset(const std::string& manifest_path, int side,
                                       LoadSummary* summary, int workers) {
    const DatasetManifest manifest = DatasetManifest::load(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    const int n = static_cast<int>(manifest.entries.size());

    std::vector<std::optional<LoadedVolume>> slots(static_cast<size_t>(n));
    std::vector<std::string> errors(static_cast<size_t>(n));

    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    auto process = [&](int i) {
        const ManifestEntry& e = manifest.entries[static_cast<size_t>(i)];
        try {
            const std::string vpath = resolve(e.volume_path);
            RawVolume raw = read_volume_file(vpath);
            if (e.modality) raw.modality = *e.modality;
            LoadedVolume lv;
            std::string id = fs::path(e.volume_path).stem().string();
            if (ends_with(id, ".nii")) id = id.substr(0, id.size() - 4);
            lv.volume = preprocess_volume(raw.voxels, raw.sx, raw.sy, raw.sz, side,
                                          raw.modality, id);
            if (!e.label_path.empty()) {
                const RawVolume lab = read_volume_file(resolve(e.label_path));
                if (lab.voxels.shape != raw.voxels.shape)
                    throw std::runtime_error("label/image shape mismatch: " +
                                             shape_str(lab.voxels.shape) + " vs " +
                                             shape_str(raw.voxels.shape));
                lv.labels = preprocess_labels(lab.voxels, lab.sx, lab.sy, lab.sz, side);
            }
            lv.class_label = e.class_label;
            lv.split = e.split;
            slots[static_cast<size_t>(i)] = std::move(lv);
        } catch (const std::exception& ex) {
            errors[static_cast<size_t>(i)] =
                "entry " + std::to_string(i) + " (" + e.volume_path + "): " + ex.what();
        }
    };

    if (workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (int i = 0; i < n; ++i) process(i);
    } else {
        for (int i = 0; i < n; ++i) process(i);
    }

    std::vector<LoadedVolume> out;
    LoadSummary local;
    local.total = n;
    for (int i = 0; i < n; ++i) {
        if (slots[static_cast<size_t>(i)]) {
            out.push_back(std::move(*slots[static_cast<size_t>(i)]));
            ++local.loaded;
        } else {
            ++local.skipped;
            local.diagnostics.push_back(errors[static_cast<size_t>(i)]);
        }
    }
    if (summary) *summary = local;
    return out;
}

void write_synth_dataset(const SynthDataset& ds, const std::string& dir, uint64_t seed) {
    fs::create_directories(fs::path(dir) / "volumes");
    fs::create_directories(fs::path(dir) / "labels");
    const int n = static_cast<int>(ds.items.size());
    Rng split_rng(seed ^ 0x5eedb00c);
    const std::vector<int> splits = split_assignment(n, split_rng);
    static const char* kSplitNames[3] = {"train", "val", "test"};
    DatasetManifest manifest;
    for (int i = 0; i < n; ++i) {
        const SynthVolume& sv = ds.items[static_cast<size_t>(i)];
        const std::string vrel = "volumes/" + sv.volume.id + ".raw";
        const std::string lrel = "labels/" + sv.volume.id + ".raw";
        write_raw_volume((fs::path(dir) / vrel).string(), sv.volume.voxels, 1.0, 1.0, 1.0,
                         sv.volume.modality);
        write_raw_volume((fs::path(dir) / lrel).string(), sv.labels, 1.0, 1.0, 1.0,
                         sv.volume.modality);
        ManifestEntry e;
        e.volume_path = vrel;
        e.label_path = lrel;
        e.class_label = sv.class_label;
        e.split = kSplitNames[splits[static_cast<size_t>(i)]];
        e.modality = sv.volume.modality;
        manifest.entries.push_back(std::move(e));
    }
    manifest.save((fs::path(dir) / "manifest.jsonl").string());
    save_caption_manifest((fs::path(dir) / "captions.jsonl").string(), ds.captions);
}

}  // namespace med3d
