#include "frugal/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "binary_io.hpp"
#include "frugal/error.hpp"
#include "frugal/random.hpp"

namespace frugal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr std::string_view kFeatureMagic = "FRUGFEAT";
constexpr std::string_view kLabelMagic = "FRUGLABL";
constexpr std::uint32_t kFormatVersion = 1;
constexpr const char* kManifest = "manifest.json";
constexpr const char* kFeatures = "features.bin";
constexpr const char* kLabels = "labels.bin";

std::uint8_t encode_label(Label l) { return static_cast<std::uint8_t>(static_cast<std::int8_t>(l)); }

Label decode_label(std::uint8_t b) {
    switch (static_cast<std::int8_t>(b)) {
        case -1: return Label::negative;
        case 0: return Label::unknown;
        case 1: return Label::positive;
        default: fail(ErrorKind::io_error, "invalid label byte " + std::to_string(b));
    }
}

// Validates magic, version and size of a blob; returns a reader past the header.
detail::ByteReader open_blob(const std::string& data, std::string_view magic, std::size_t header_extra,
                             std::size_t payload, const fs::path& path) {
    if (data.size() < magic.size() + 4 || std::string_view(data).substr(0, magic.size()) != magic)
        fail(ErrorKind::version_error, path.string() + ": bad magic bytes, not a dataset blob of this format");
    detail::ByteReader r(data);
    r.bytes(magic.size());
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        fail(ErrorKind::version_error, path.string() + ": format version " + std::to_string(version) +
                                           " is not supported (expected " + std::to_string(kFormatVersion) + ")");
    const std::size_t expected = magic.size() + 4 + header_extra + payload;
    if (data.size() != expected)
        fail(ErrorKind::io_error, path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                                      std::to_string(data.size()));
    return r;
}

}  // namespace

std::size_t grid_cells(std::uint32_t extent, std::uint32_t patch_size, std::uint32_t stride) {
    if (patch_size == 0 || stride == 0 || extent < patch_size) return 0;
    return (extent - patch_size) / stride + 1;
}

Dataset extract_patch_pairs(const Image& ref, const Image& test, const PatchGrid& grid_in, FeatureMode mode) {
    require(ref.width == test.width && ref.height == test.height, ErrorKind::invalid_argument,
            "reference and test images differ in size (" + std::to_string(ref.width) + "x" +
                std::to_string(ref.height) + " vs " + std::to_string(test.width) + "x" + std::to_string(test.height) +
                ")");
    require(grid_in.stride >= 1 && grid_in.patch_size >= 1, ErrorKind::invalid_argument,
            "patch size and stride must be positive");
    PatchGrid grid = grid_in;
    grid.image_width = ref.width;
    grid.image_height = ref.height;
    grid.channels = 3;

    const std::size_t gx = grid_cells(ref.width, grid.patch_size, grid.stride);
    const std::size_t gy = grid_cells(ref.height, grid.patch_size, grid.stride);
    const std::size_t P = grid.patch_size;
    const std::size_t patch_len = P * P * 3;

    Dataset ds;
    ds.n = gx * gy;
    ds.d = mode == FeatureMode::concat ? 2 * patch_len : patch_len;
    ds.feature_mode = mode;
    ds.grid = grid;
    ds.features.reserve(ds.n * ds.d);
    for (std::size_t cy = 0; cy < gy; ++cy) {
        for (std::size_t cx = 0; cx < gx; ++cx) {
            const auto x0 = static_cast<std::uint32_t>(cx * grid.stride);
            const auto y0 = static_cast<std::uint32_t>(cy * grid.stride);
            std::string id = "r" + std::to_string(cy) + "c" + std::to_string(cx);
            if (mode == FeatureMode::concat) {
                for (const Image* img : {&ref, &test})
                    for (std::uint32_t y = 0; y < P; ++y)
                        for (std::uint32_t x = 0; x < P; ++x)
                            for (std::uint32_t c = 0; c < 3; ++c)
                                ds.features.push_back(static_cast<float>(img->at(x0 + x, y0 + y, c)) / 255.0f);
            } else {
                for (std::uint32_t y = 0; y < P; ++y)
                    for (std::uint32_t x = 0; x < P; ++x)
                        for (std::uint32_t c = 0; c < 3; ++c) {
                            const int diff = std::abs(static_cast<int>(ref.at(x0 + x, y0 + y, c)) -
                                                      static_cast<int>(test.at(x0 + x, y0 + y, c)));
                            ds.features.push_back(static_cast<float>(diff) / 255.0f);
                        }
            }
            ds.patch_refs.push_back({x0, y0, "patches/" + id + "_ref.png", "patches/" + id + "_test.png"});
            ds.ids.push_back(std::move(id));
        }
    }
    return ds;
}

void export_patch_images(const Image& ref, const Image& test, const Dataset& ds, const fs::path& dir) {
    require(ds.grid.has_value(), ErrorKind::invalid_argument, "dataset has no patch grid");
    const std::uint32_t P = ds.grid->patch_size;
    for (const auto& pr : ds.patch_refs) {
        fs::create_directories((dir / pr.ref_file).parent_path());
        write_png(crop(ref, pr.x, pr.y, P, P), dir / pr.ref_file);
        write_png(crop(test, pr.x, pr.y, P, P), dir / pr.test_file);
    }
}

namespace {

void check_spec(const SyntheticSpec& spec) {
    require(spec.n >= 2 && spec.d >= 1, ErrorKind::invalid_argument, "synthetic pool needs n >= 2 and d >= 1");
    require(spec.positive_rate > 0 && spec.positive_rate < 1, ErrorKind::invalid_argument,
            "positive_rate must lie in (0, 1)");
    require(spec.n_modes >= 2, ErrorKind::invalid_argument, "n_modes must be >= 2");
    require(spec.positive_modes >= 1 && spec.positive_modes < spec.n_modes, ErrorKind::invalid_argument,
            "positive_modes must lie in [1, n_modes)");
    require(spec.separation >= 0 && spec.noise >= 0, ErrorKind::invalid_argument,
            "separation and noise must be non-negative");
}

}  // namespace

SyntheticSpec parse_synthetic_spec(const std::string& text) {
    SyntheticSpec spec;
    if (text.empty() || text == "default") return spec;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        require(eq != std::string::npos, ErrorKind::invalid_argument, "synthetic spec item '" + item + "' lacks '='");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        require(end && *end == '\0' && !value.empty(), ErrorKind::invalid_argument,
                "synthetic spec value for '" + key + "' is not a number");
        if (key == "n") spec.n = static_cast<std::size_t>(v);
        else if (key == "d") spec.d = static_cast<std::size_t>(v);
        else if (key == "rate") spec.positive_rate = v;
        else if (key == "modes") spec.n_modes = static_cast<std::size_t>(v);
        else if (key == "positive_modes") spec.positive_modes = static_cast<std::size_t>(v);
        else if (key == "separation") spec.separation = v;
        else if (key == "noise") spec.noise = v;
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(v);
        else fail(ErrorKind::invalid_argument, "unknown synthetic spec key '" + key + "'");
    }
    check_spec(spec);
    return spec;
}

std::pair<Dataset, LabelVector> generate_synthetic(const SyntheticSpec& spec) {
    check_spec(spec);

    const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(spec.n) * spec.positive_rate));
    require(n_pos >= 1 && n_pos < spec.n, ErrorKind::invalid_argument, "positive count must lie in [1, n)");

    Rng rng(spec.seed);
    // Centers are random directions scaled so that two centers sit about
    // `separation` apart.
    Matrix centers(spec.n_modes, spec.d);
    for (std::size_t k = 0; k < spec.n_modes; ++k) {
        double norm = 0.0;
        for (std::size_t j = 0; j < spec.d; ++j) {
            centers(k, j) = rng.normal();
            norm += centers(k, j) * centers(k, j);
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < spec.d; ++j) centers(k, j) *= spec.separation / (std::sqrt(2.0) * norm);
    }

    // Negative mode sizes from uneven weights.
    const std::size_t neg_modes = spec.n_modes - spec.positive_modes;
    const std::size_t n_neg = spec.n - n_pos;
    std::vector<double> weight(neg_modes);
    double wsum = 0.0;
    for (double& w : weight) {
        w = rng.uniform(0.5, 1.5);
        wsum += w;
    }
    std::vector<std::size_t> mode_of;
    mode_of.reserve(spec.n);
    LabelVector labels;
    labels.reserve(spec.n);
    for (std::size_t p = 0; p < n_pos; ++p) {
        mode_of.push_back(p % spec.positive_modes);
        labels.push_back(Label::positive);
    }
    std::size_t assigned = 0;
    for (std::size_t m = 0; m < neg_modes; ++m) {
        const std::size_t count = m + 1 == neg_modes
                                      ? n_neg - assigned
                                      : static_cast<std::size_t>(std::floor(static_cast<double>(n_neg) * weight[m] / wsum));
        for (std::size_t c = 0; c < count; ++c) {
            mode_of.push_back(spec.positive_modes + m);
            labels.push_back(Label::negative);
        }
        assigned += count;
    }

    // Interleave classes so that row order carries no label information.
    std::vector<std::size_t> order(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) order[i] = i;
    rng.shuffle(order.begin(), order.end());

    std::vector<double> raw(spec.n * spec.d);
    LabelVector shuffled(spec.n);
    for (std::size_t r = 0; r < spec.n; ++r) {
        const std::size_t src = order[r];
        shuffled[r] = labels[src];
        for (std::size_t j = 0; j < spec.d; ++j)
            raw[r * spec.d + j] = centers(mode_of[src], j) + spec.noise * rng.normal();
    }

    for (std::size_t j = 0; j < spec.d; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < spec.n; ++r) {
            lo = std::min(lo, raw[r * spec.d + j]);
            hi = std::max(hi, raw[r * spec.d + j]);
        }
        for (std::size_t r = 0; r < spec.n; ++r)
            raw[r * spec.d + j] = hi > lo ? (raw[r * spec.d + j] - lo) / (hi - lo) : 0.0;
    }

    Dataset ds;
    ds.n = spec.n;
    ds.d = spec.d;
    ds.features.assign(raw.begin(), raw.end());
    ds.ids.reserve(spec.n);
    char buf[32];
    for (std::size_t i = 0; i < spec.n; ++i) {
        std::snprintf(buf, sizeof buf, "s%05zu", i);
        ds.ids.emplace_back(buf);
    }
    return {std::move(ds), std::move(shuffled)};
}

void save_dataset(const Dataset& ds, const LabelVector* labels, const fs::path& dir) {
    const auto report = validate_dataset(ds, labels);
    require(report.ok(), ErrorKind::invalid_argument, "refusing to save invalid dataset: " + report.summary());
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io_error, "cannot create " + dir.string() + ": " + ec.message());

    detail::ByteWriter fw;
    fw.bytes(kFeatureMagic);
    fw.u32(kFormatVersion);
    fw.u64(ds.n);
    fw.u64(ds.d);
    for (float v : ds.features) fw.f32(v);
    detail::write_file_atomic(dir / kFeatures, fw.str());

    if (labels) {
        detail::ByteWriter lw;
        lw.bytes(kLabelMagic);
        lw.u32(kFormatVersion);
        lw.u64(labels->size());
        for (Label l : *labels) lw.u8(encode_label(l));
        detail::write_file_atomic(dir / kLabels, lw.str());
    } else {
        fs::remove(dir / kLabels, ec);
    }

    json m;
    m["format"] = "frugal-dataset";
    m["format_version"] = kFormatVersion;
    m["n"] = ds.n;
    m["d"] = ds.d;
    m["feature_mode"] = to_string(ds.feature_mode);
    if (ds.grid) {
        m["grid"] = {{"patch_size", ds.grid->patch_size},   {"stride", ds.grid->stride},
                     {"image_width", ds.grid->image_width}, {"image_height", ds.grid->image_height},
                     {"channels", ds.grid->channels}};
    } else {
        m["grid"] = nullptr;
    }
    m["features_file"] = kFeatures;
    m["labels_file"] = labels ? json(kLabels) : json(nullptr);
    m["ids"] = ds.ids;
    json refs = json::array();
    for (const auto& pr : ds.patch_refs) refs.push_back({{"x", pr.x}, {"y", pr.y}, {"ref", pr.ref_file}, {"test", pr.test_file}});
    m["patch_refs"] = refs;
    detail::write_file_atomic(dir / kManifest, m.dump(2) + "\n");
}

LoadedDataset load_dataset(const fs::path& dir) {
    json m;
    try {
        m = json::parse(detail::read_file(dir / kManifest));
    } catch (const json::exception& e) {
        fail(ErrorKind::io_error, (dir / kManifest).string() + ": malformed manifest (" + e.what() + ")");
    }
    if (m.value("format", "") != "frugal-dataset")
        fail(ErrorKind::version_error, (dir / kManifest).string() + ": not a dataset manifest");
    if (m.value("format_version", 0u) != kFormatVersion)
        fail(ErrorKind::version_error, (dir / kManifest).string() + ": manifest format version " +
                                           m.value("format_version", json(0)).dump() + " is not supported");

    LoadedDataset out;
    Dataset& ds = out.dataset;
    try {
        ds.n = m.at("n").get<std::size_t>();
        ds.d = m.at("d").get<std::size_t>();
        ds.feature_mode = feature_mode_from_string(m.at("feature_mode").get<std::string>());
        if (!m.at("grid").is_null()) {
            const auto& g = m.at("grid");
            ds.grid = PatchGrid{g.at("patch_size"), g.at("stride"), g.at("image_width"), g.at("image_height"),
                                g.at("channels")};
        }
        ds.ids = m.at("ids").get<std::vector<std::string>>();
        for (const auto& pr : m.at("patch_refs"))
            ds.patch_refs.push_back({pr.at("x"), pr.at("y"), pr.at("ref"), pr.at("test")});
    } catch (const json::exception& e) {
        fail(ErrorKind::io_error, (dir / kManifest).string() + ": malformed manifest (" + e.what() + ")");
    }

    const auto feat_path = dir / m.value("features_file", std::string(kFeatures));
    const std::string feat = detail::read_file(feat_path);
    auto fr = open_blob(feat, kFeatureMagic, 16, ds.n * ds.d * 4, feat_path);
    if (fr.u64() != ds.n || fr.u64() != ds.d)
        fail(ErrorKind::io_error, feat_path.string() + ": blob shape disagrees with the manifest");
    ds.features.resize(ds.n * ds.d);
    for (float& v : ds.features) v = fr.f32();

    if (m.contains("labels_file") && !m["labels_file"].is_null()) {
        const auto lab_path = dir / m["labels_file"].get<std::string>();
        const std::string lab = detail::read_file(lab_path);
        auto lr = open_blob(lab, kLabelMagic, 8, ds.n, lab_path);
        if (lr.u64() != ds.n) fail(ErrorKind::io_error, lab_path.string() + ": label count disagrees with the manifest");
        LabelVector labels(ds.n);
        for (Label& l : labels) l = decode_label(lr.u8());
        out.labels = std::move(labels);
    }
    return out;
}

LoadedDataset import_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::io_error, path.string() + ": empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    const auto header = split(line);
    require(header.size() >= 3 && header[0] == "id" && header[1] == "y", ErrorKind::invalid_argument,
            path.string() + ": header must be id,y,f_1..f_d");
    for (std::size_t j = 2; j < header.size(); ++j)
        require(header[j] == "f_" + std::to_string(j - 1), ErrorKind::invalid_argument,
                path.string() + ": header column " + std::to_string(j + 1) + " should be f_" + std::to_string(j - 1));

    LoadedDataset out;
    Dataset& ds = out.dataset;
    ds.d = header.size() - 2;
    LabelVector labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        require(cells.size() == header.size(), ErrorKind::invalid_argument,
                path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                    " columns, found " + std::to_string(cells.size()));
        ds.ids.push_back(cells[0]);
        const std::string& y = cells[1];
        if (y.empty() || y == "0" || y == "?") labels.push_back(Label::unknown);
        else if (y == "1" || y == "+1") labels.push_back(Label::positive);
        else if (y == "-1") labels.push_back(Label::negative);
        else fail(ErrorKind::invalid_argument, path.string() + ":" + std::to_string(line_no) + ": bad label '" + y + "'");
        for (std::size_t j = 2; j < cells.size(); ++j) {
            char* end = nullptr;
            const double v = std::strtod(cells[j].c_str(), &end);
            require(end && *end == '\0' && !cells[j].empty(), ErrorKind::invalid_argument,
                    path.string() + ":" + std::to_string(line_no) + ": bad number '" + cells[j] + "'");
            ds.features.push_back(static_cast<float>(v));
        }
    }
    ds.n = ds.ids.size();
    out.labels = std::move(labels);
    return out;
}

}  // namespace frugal
