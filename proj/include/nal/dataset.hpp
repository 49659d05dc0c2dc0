#pragma once

// Dataset directories:
//   scenes.jsonl          one scene per line
//   facts/img_<i>.facts   fact-only framework text
//   labels.csv            image_id,label,confidence
// Learning and evaluation only need facts/ and labels.csv; scenes.jsonl, when
// present, also fixes the train/test split.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "parser.hpp"
#include "scene.hpp"

namespace nal {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SceneRecord {
    Scene scene;
    bool positive = true;
    std::string split;  // "train" or "test"
};

struct LabeledImage {
    std::string image_id;
    std::string label;
    double confidence = 1.0;
    std::string split;
    std::vector<Atom> facts;
};

/// The last third of a generated dataset is held out.
inline std::string split_for(std::size_t index, std::size_t n) { return index >= n - n / 3 ? "test" : "train"; }

/// Binary datasets alternate positives and negatives (even indices positive).
/// With `class_id` empty, a CLEVR-like multi-class dataset cycles through the
/// mode's classes, every scene a positive of its class.
inline std::vector<SceneRecord> generate_dataset(Mode mode, const std::string& class_id, std::size_t n,
                                                 std::uint64_t seed) {
    std::vector<SceneRecord> out;
    out.reserve(n);
    auto classes = classes_of(mode);
    if (!class_id.empty() && find_concept(class_id).mode != mode)
        throw std::invalid_argument("class " + class_id + " does not belong to mode " + to_string(mode));
    for (std::size_t i = 0; i < n; ++i) {
        SceneRecord r;
        std::string cls = class_id.empty() ? classes[i % classes.size()] : class_id;
        r.positive = class_id.empty() || i % 2 == 0;
        r.scene = generate_scene(cls, r.positive, scene_seed(seed, cls, i), i);
        r.split = split_for(i, n);
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json scene_to_json(const SceneRecord& r) {
    const auto& vocab = vocabulary(r.scene.mode);
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : r.scene.objects) {
        nlohmann::json jo{{"id", o.id}, {"col", o.col}, {"row", o.row}};
        for (std::size_t k = 0; k < vocab.families.size(); ++k) jo[vocab.families[k].name] = o.attributes[k];
        objects.push_back(std::move(jo));
    }
    return {{"image_id", r.scene.image_id}, {"mode", to_string(r.scene.mode)}, {"label", r.scene.label},
            {"positive", r.positive},        {"split", r.split},                {"objects", std::move(objects)}};
}

inline SceneRecord scene_from_json(const nlohmann::json& j) {
    SceneRecord r;
    r.scene.image_id = j.at("image_id").get<std::string>();
    r.scene.mode = parse_mode(j.at("mode").get<std::string>());
    r.scene.label = j.at("label").get<std::string>();
    r.positive = j.at("positive").get<bool>();
    r.split = j.at("split").get<std::string>();
    const auto& vocab = vocabulary(r.scene.mode);
    for (const auto& jo : j.at("objects")) {
        SceneObject o;
        o.id = jo.at("id").get<std::string>();
        o.col = jo.at("col").get<int>();
        o.row = jo.at("row").get<int>();
        for (const auto& f : vocab.families) o.attributes.push_back(jo.at(f.name).get<std::string>());
        r.scene.objects.push_back(std::move(o));
    }
    return r;
}

/// Parses a fact-only framework text (no variables, no assumptions).
inline std::vector<Atom> parse_facts(std::string_view text) {
    auto fw = parse_framework(text);
    if (!fw.assumptions.empty()) throw ValidationError("fact files may not declare assumptions");
    std::vector<Atom> out;
    for (const auto& r : fw.rules) {
        if (!r.body.empty() || !r.head.is_ground()) throw ValidationError("not a ground fact: " + r.to_string());
        out.push_back(r.head);
    }
    return out;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DatasetError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DatasetError("cannot write " + p.string());
    out << text;
}

inline std::vector<Atom> read_facts_file(const std::filesystem::path& p) {
    try {
        return parse_facts(read_text(p));
    } catch (const std::runtime_error& e) {
        throw DatasetError(p.string() + ":" + e.what());
    }
}

inline void write_dataset(const std::filesystem::path& dir, const std::vector<SceneRecord>& records) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "facts");
    std::string jsonl, labels = "image_id,label,confidence\n";
    for (const auto& r : records) {
        jsonl += scene_to_json(r).dump() + "\n";
        labels += r.scene.image_id + "," + r.scene.label + ",1.0\n";
        write_text(dir / "facts" / (r.scene.image_id + ".facts"), facts_to_text(scene_to_facts(r.scene)));
    }
    write_text(dir / "scenes.jsonl", jsonl);
    write_text(dir / "labels.csv", labels);
}

inline std::vector<SceneRecord> read_scenes(const std::filesystem::path& dir) {
    std::vector<SceneRecord> out;
    std::istringstream in(read_text(dir / "scenes.jsonl"));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(scene_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError("scenes.jsonl line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

struct LabelRow {
    std::string image_id;
    std::string label;
    double confidence = 1.0;
};

inline std::vector<LabelRow> read_labels(const std::filesystem::path& p) {
    std::istringstream in(read_text(p));
    std::string line;
    std::vector<LabelRow> out;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (lineno == 1 && line.rfind("image_id", 0) == 0)) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2 || cells.size() > 3)
            throw DatasetError(p.string() + " line " + std::to_string(lineno) + ": expected image_id,label[,confidence]");
        LabelRow row{cells[0], cells[1], 1.0};
        if (cells.size() == 3) {
            try {
                std::size_t used = 0;
                row.confidence = std::stod(cells[2], &used);
                if (used != cells[2].size()) throw std::invalid_argument(cells[2]);
            } catch (const std::exception&) {
                throw DatasetError(p.string() + " line " + std::to_string(lineno) + ": bad confidence '" + cells[2] + "'");
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

/// Loads labels and facts. The split comes from scenes.jsonl when present,
/// otherwise from the position in labels.csv.
inline std::vector<LabeledImage> load_dataset(const std::filesystem::path& dir) {
    auto rows = read_labels(dir / "labels.csv");
    std::map<std::string, std::string> split;
    if (std::filesystem::exists(dir / "scenes.jsonl"))
        for (const auto& r : read_scenes(dir)) split[r.scene.image_id] = r.split;
    std::vector<LabeledImage> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        LabeledImage img{rows[i].image_id, rows[i].label, rows[i].confidence, {}, {}};
        auto it = split.find(img.image_id);
        img.split = it != split.end() ? it->second : split_for(i, rows.size());
        img.facts = read_facts_file(dir / "facts" / (img.image_id + ".facts"));
        out.push_back(std::move(img));
    }
    return out;
}

/// The image constant described by a fact list (the argument of its single
/// image/1 fact).
inline std::string image_of(const std::vector<Atom>& facts) {
    std::string found;
    for (const auto& f : facts) {
        if (f.predicate != "image" || f.arity() != 1) continue;
        if (!found.empty() && found != f.args[0].name) throw ValidationError("facts describe more than one image");
        found = f.args[0].name;
    }
    if (found.empty()) throw ValidationError("facts contain no image/1 atom");
    return found;
}

}  // namespace nal
