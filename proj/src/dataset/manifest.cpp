#include "lungbench/dataset/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"

namespace lungbench::dataset {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        out.push_back(line.substr(pos, tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_compact_date(std::string_view t) {
    return t.size() == 8 && all_digits(t) && (t.starts_with("19") || t.starts_with("20"));
}

bool is_dashed_date(std::string_view t) {
    return t.size() >= 10 && all_digits(t.substr(0, 4)) && t[4] == '-' && all_digits(t.substr(5, 2)) &&
           t[7] == '-' && all_digits(t.substr(8, 2));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
        case Split::unassigned: return "unassigned";
    }
    return "unassigned";
}

std::optional<Split> parse_split(std::string_view token) {
    if (token == "train") return Split::train;
    if (token == "validation") return Split::validation;
    if (token == "test") return Split::test;
    if (token == "unassigned" || token.empty()) return Split::unassigned;
    return std::nullopt;
}

std::string derive_group_key(std::string_view filename) {
    std::string name(filename);
    if (const auto slash = name.find_last_of("/\\"); slash != std::string::npos) name.erase(0, slash + 1);
    if (const auto dot = name.rfind('.'); dot != std::string::npos) name.erase(dot);
    if (name.ends_with("_label")) name.erase(name.size() - 6);

    std::vector<std::string> tokens;
    {
        std::stringstream ss(name);
        std::string tok;
        while (std::getline(ss, tok, '_')) tokens.push_back(tok);
    }
    std::string device;
    std::size_t first = 0;
    if (!tokens.empty() && (tokens[0] == "steth" || tokens[0] == "trunc")) {
        device = tokens[0];
        first = 1;
    }
    for (std::size_t i = first; i < tokens.size(); ++i) {
        std::string date;
        if (is_compact_date(tokens[i])) date = tokens[i];
        else if (is_dashed_date(tokens[i])) date = tokens[i].substr(0, 10);
        if (!date.empty()) return device.empty() ? date : device + "_" + date;
    }
    const auto cut = name.find_last_of("_-");
    if (cut == std::string::npos || cut == 0) return name;
    return name.substr(0, cut);
}

DatasetManifest read_manifest(const fs::path& path, bool load_labels) {
    std::ifstream in(path);
    if (!in) throw Error("io.open", "cannot open manifest " + path.string());
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& ref) -> std::string {
        if (ref.empty()) return {};
        const fs::path p(ref);
        return (p.is_absolute() ? p : base / p).lexically_normal().string();
    };

    DatasetManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            body.erase(0, body.find_first_not_of(' '));
            if (body.starts_with("fold_count=")) manifest.fold_count = std::stoi(body.substr(11));
            else if (body.starts_with("seed=")) manifest.seed = std::stoull(body.substr(5));
            continue;
        }
        auto cols = split_tabs(line);
        if (!header_seen && !cols.empty() && cols[0] == "clip") {
            header_seen = true;
            continue;
        }
        if (cols.size() < 3 || cols.size() > 4) {
            throw Error("manifest.syntax", path.string() + ": line " + std::to_string(line_no) +
                                               ": expected clip, labels, group[, split]");
        }
        RecordingRecord rec;
        rec.clip_ref = resolve(cols[0]);
        rec.label_ref = resolve(cols[1]);
        rec.group_key = cols[2].empty() ? derive_group_key(cols[0]) : cols[2];
        const auto split = parse_split(cols.size() == 4 ? cols[3] : std::string{});
        if (!split) {
            throw Error("manifest.split", path.string() + ": line " + std::to_string(line_no) +
                                              ": unknown split '" + cols[3] + "'");
        }
        rec.split = *split;
        if (load_labels && !rec.label_ref.empty()) rec.labels = read_label_file(rec.label_ref);
        manifest.records.push_back(std::move(rec));
    }
    check_group_consistency(manifest);
    return manifest;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw Error("io.open", "cannot write manifest " + path.string());
    const fs::path base = fs::absolute(path).parent_path();
    auto relative = [&](const std::string& ref) -> std::string {
        if (ref.empty()) return {};
        const fs::path p = fs::absolute(ref).lexically_normal();
        const fs::path rel = p.lexically_relative(base);
        return rel.empty() ? p.string() : rel.string();
    };
    out << "# lungbench manifest v1\n";
    out << "# fold_count=" << manifest.fold_count << "\n";
    out << "# seed=" << manifest.seed << "\n";
    out << "clip\tlabels\tgroup\tsplit\n";
    for (const auto& rec : manifest.records) {
        out << relative(rec.clip_ref) << '\t' << relative(rec.label_ref) << '\t' << rec.group_key << '\t'
            << to_string(rec.split) << '\n';
    }
    if (!out) throw Error("io.write", "write failed: " + path.string());
}

void check_group_consistency(const DatasetManifest& manifest) {
    std::map<std::string, Split> seen;
    for (const auto& rec : manifest.records) {
        auto [it, inserted] = seen.emplace(rec.group_key, rec.split);
        if (!inserted && it->second != rec.split) {
            throw Error("manifest.leakage", "group '" + rec.group_key + "' spans splits " +
                                                to_string(it->second) + " and " + to_string(rec.split));
        }
    }
}

void assign_group_splits(DatasetManifest& manifest, double test_fraction, std::uint64_t seed) {
    std::set<std::string> group_set;
    for (const auto& rec : manifest.records) {
        if (rec.split == Split::unassigned) group_set.insert(rec.group_key);
    }
    std::vector<std::string> groups(group_set.begin(), group_set.end());
    Rng rng(mix_seed(seed, 0x5101));
    rng.shuffle(groups);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(groups.size())));
    if (test_fraction > 0.0 && n_test == 0 && groups.size() > 1) n_test = 1;
    n_test = std::min(n_test, groups.size());
    const std::set<std::string> test_groups(groups.begin(), groups.begin() + static_cast<std::ptrdiff_t>(n_test));
    for (auto& rec : manifest.records) {
        if (rec.split != Split::unassigned) continue;
        rec.split = test_groups.contains(rec.group_key) ? Split::test : Split::train;
    }
    check_group_consistency(manifest);
}

DatasetManifest ingest_directory(const fs::path& root, double test_fraction, std::uint64_t seed) {
    if (!fs::is_directory(root)) throw Error("io.open", "not a directory: " + root.string());
    std::vector<fs::path> wavs;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && lower(entry.path().extension().string()) == ".wav") {
            wavs.push_back(entry.path());
        }
    }
    std::sort(wavs.begin(), wavs.end());

    DatasetManifest manifest;
    manifest.seed = seed;
    for (const auto& wav : wavs) {
        const fs::path label = wav.parent_path() / (wav.stem().string() + "_label.txt");
        if (!fs::exists(label)) continue;
        RecordingRecord rec;
        rec.clip_ref = wav.string();
        rec.label_ref = label.string();
        rec.group_key = derive_group_key(wav.filename().string());
        for (const auto& part : wav.lexically_relative(root).parent_path()) {
            const auto p = lower(part.string());
            if (p == "train") rec.split = Split::train;
            if (p == "test") rec.split = Split::test;
        }
        rec.labels = read_label_file(label);
        manifest.records.push_back(std::move(rec));
    }
    assign_group_splits(manifest, test_fraction, seed);
    return manifest;
}

}  // namespace lungbench::dataset
