#include "forgan/eval/report.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "forgan/data/csv.hpp"
#include "forgan/error.hpp"

namespace forgan::eval {
namespace {

using nlohmann::json;

json kld_json(const std::optional<double>& k) {
    return k ? json(*k) : json("undefined");
}

json summary_json(const MetricSummary& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"per_run", s.per_run}};
}

json histogram_json(const Histogram& truth, const Histogram& predicted) {
    return {{"edges", truth.edges()},
            {"p_counts", truth.counts()},
            {"q_counts", predicted.counts()},
            {"p_total", truth.total()},
            {"q_total", predicted.total()}};
}

}  // namespace

std::string report_to_json(const EvaluationReport& r) {
    json doc = {
        {"model", r.model},
        {"protocol", r.protocol},
        {"windows", r.windows},
        {"runs", r.runs},
        {"samples_per_condition", r.samples_per_condition},
        {"forecast_draws", r.forecast_draws},
        {"rmse", summary_json(r.rmse)},
        {"mae", summary_json(r.mae)},
        {"mape", r.mape ? summary_json(*r.mape) : json("undefined")},
        {"kld", kld_json(r.kld)},
        {"histogram", histogram_json(r.truth, r.predicted)},
    };
    json clusters = json::array();
    for (const auto& c : r.clusters) {
        clusters.push_back({{"cluster", c.cluster},
                            {"windows", c.windows},
                            {"kld", kld_json(c.kld)},
                            {"histogram", histogram_json(c.truth, c.predicted)}});
    }
    doc["clusters"] = std::move(clusters);
    return doc.dump(2);
}

void write_report(const EvaluationReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write report '" + path.string() + "'");
    out << report_to_json(report) << '\n';
}

void write_histogram_csv(const Histogram& truth, const Histogram& predicted, const std::filesystem::path& path) {
    if (truth.edges() != predicted.edges()) throw ContractError("histogram overlay needs shared edges");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write histogram '" + path.string() + "'");
    const auto p = truth.masses();
    const auto q = predicted.masses();
    const auto& e = truth.edges();
    out << "edge_low,edge_high,p_mass,q_mass\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << data::format_double(e[i]) << ',' << data::format_double(e[i + 1]) << ',' << data::format_double(p[i])
            << ',' << data::format_double(q[i]) << '\n';
    }
}

}  // namespace forgan::eval
