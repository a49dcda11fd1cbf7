#include "forgan/data/dataset_io.hpp"

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "forgan/data/csv.hpp"
#include "forgan/error.hpp"

namespace forgan::data {
namespace {

constexpr int kDatasetFormatVersion = 1;

}  // namespace

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

void write_dataset(const WindowedDataset& ds, const std::filesystem::path& csv_path) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write dataset file '" + csv_path.string() + "'");

    const std::size_t c = ds.condition_len();
    std::string line;
    for (std::size_t k = 0; k < c; ++k) {
        line += 'c';
        line += std::to_string(k);
        line += ',';
    }
    line += "target";
    if (ds.has_clusters()) line += ",cluster";
    out << line << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        line.clear();
        for (double v : ds.condition(i)) {
            line += format_double(v);
            line += ',';
        }
        line += format_double(ds.target(i));
        if (ds.has_clusters()) {
            line += ',';
            line += std::to_string(ds.cluster(i));
        }
        out << line << '\n';
    }
    if (!out) throw DataError("failed while writing '" + csv_path.string() + "'");

    nlohmann::json meta = {
        {"format", "forgan-dataset"},
        {"version", kDatasetFormatVersion},
        {"condition_len", c},
        {"rows", ds.size()},
        {"has_clusters", ds.has_clusters()},
        {"scaler", {{"offset", ds.scaler().offset}, {"scale", ds.scaler().scale}}},
        {"split",
         {{"train", ds.split().train}, {"validation", ds.split().validation}, {"test", ds.split().test}}},
        {"provenance",
         {{"kind", ds.provenance().kind},
          {"params", nlohmann::json::parse(ds.provenance().params_json)},
          {"seed", ds.provenance().seed}}},
    };
    const auto meta_path = metadata_path(csv_path);
    std::ofstream mout(meta_path, std::ios::binary | std::ios::trunc);
    if (!mout) throw DataError("cannot write dataset metadata '" + meta_path.string() + "'");
    mout << meta.dump(1) << '\n';
}

WindowedDataset read_dataset(const std::filesystem::path& csv_path) {
    const auto meta_path = metadata_path(csv_path);
    std::ifstream min(meta_path);
    if (!min) throw DataError("cannot open dataset metadata '" + meta_path.string() + "'");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(min);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed dataset metadata '" + meta_path.string() + "': " + e.what());
    }

    std::size_t c = 0;
    std::size_t rows = 0;
    bool has_clusters = false;
    SplitIndices split;
    AffineScaler scaler;
    Provenance prov;
    try {
        if (meta.at("format") != "forgan-dataset") throw FormatError("not a forgan dataset");
        if (meta.at("version").get<int>() != kDatasetFormatVersion) {
            throw FormatError("unsupported dataset format version " + meta.at("version").dump());
        }
        c = meta.at("condition_len").get<std::size_t>();
        rows = meta.at("rows").get<std::size_t>();
        has_clusters = meta.at("has_clusters").get<bool>();
        split.train = meta.at("split").at("train").get<std::vector<std::size_t>>();
        split.validation = meta.at("split").at("validation").get<std::vector<std::size_t>>();
        split.test = meta.at("split").at("test").get<std::vector<std::size_t>>();
        scaler.offset = meta.at("scaler").at("offset").get<double>();
        scaler.scale = meta.at("scaler").at("scale").get<double>();
        prov.kind = meta.at("provenance").at("kind").get<std::string>();
        prov.params_json = meta.at("provenance").at("params").dump();
        prov.seed = meta.at("provenance").at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("dataset metadata '" + meta_path.string() + "' is incomplete: " + e.what());
    }

    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open dataset file '" + csv_path.string() + "'");
    const std::size_t width = c + 1 + (has_clusters ? 1 : 0);
    std::vector<double> conditions;
    conditions.reserve(rows * c);
    std::vector<double> targets;
    targets.reserve(rows);
    std::vector<int> clusters;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != width) {
            throw DataError("dataset '" + csv_path.string() + "' line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
        }
        for (std::size_t k = 0; k <= c; ++k) {
            const auto v = parse_double(fields[k]);
            if (!v) {
                throw DataError("dataset '" + csv_path.string() + "' line " + std::to_string(line_no) +
                                ": cannot parse '" + fields[k] + "'");
            }
            (k < c ? conditions : targets).push_back(*v);
        }
        if (has_clusters) clusters.push_back(std::stoi(fields[c + 1]));
    }
    if (targets.size() != rows) {
        throw FormatError("dataset '" + csv_path.string() + "' has " + std::to_string(targets.size()) +
                          " rows, metadata says " + std::to_string(rows));
    }
    WindowedDataset ds(c, std::move(conditions), std::move(targets), std::move(clusters), std::move(split),
                       std::move(prov));
    if (!(ds.scaler() == scaler)) {
        throw FormatError("dataset '" + csv_path.string() + "' scaler does not match its train split");
    }
    return ds;
}

}  // namespace forgan::data
