#include "tsfs/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tsfs/errors.hpp"

namespace tsfs {

using nlohmann::json;

namespace {

json scores_json(const Vector& scores) {
    json out = json::array();
    for (double v : scores) out.push_back(v);
    return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json cv_json(const CvResult& r) { return json{{"mean", r.mean}, {"per_fold", r.per_fold}}; }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_json(const SelectionResult& s) {
    json j;
    j["method"] = s.method;
    j["teacher"] = s.teacher;
    j["seeds"] = s.seeds;
    j["higher_is_better"] = s.higher_is_better;
    j["percent"] = s.percent;
    j["m"] = s.m;
    j["scores"] = scores_json(s.scores);
    j["ranking"] = s.ranking;
    j["selected"] = s.selected;
    return dump(j);
}

SelectionResult selection_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("selection file: ") + e.what(), 0, 0);
    }
    SelectionResult s;
    try {
        s.method = j.at("method").get<std::string>();
        s.teacher = j.value("teacher", std::string{});
        if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
        s.higher_is_better = j.value("higher_is_better", true);
        s.percent = j.at("percent").get<double>();
        s.m = j.at("m").get<std::size_t>();
        s.scores = j.at("scores").get<Vector>();
        s.ranking = j.at("ranking").get<std::vector<std::size_t>>();
        s.selected = j.at("selected").get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("selection file: ") + e.what(), 0, 0);
    }
    const std::size_t d = s.scores.size();
    if (s.ranking.size() != d || s.selected.size() != s.m || s.m == 0 || s.m > d)
        throw ParseError("selection file: inconsistent sizes of scores, ranking and selected", 0, 0);
    for (std::size_t idx : s.selected)
        if (idx >= d) throw ParseError("selection file: selected index out of range", 0, 0);
    return s;
}

std::string to_json(const BaselineResult& r) {
    json j;
    j["method"] = r.method;
    j["teacher"] = "";
    j["higher_is_better"] = r.higher_is_better;
    j["scores"] = scores_json(r.scores);
    j["ranking"] = r.ranking;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    return dump(j);
}

std::string to_json(const MetricReport& r) {
    json j;
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["teacher"] = r.teacher;
    j["percent"] = r.percent;
    j["m"] = r.m;
    j["seed"] = r.seed;
    if (r.clustering) {
        j["clustering"] = json{{"acc_mean", r.clustering->acc_mean},
                               {"nmi_mean", r.clustering->nmi_mean},
                               {"acc", r.clustering->acc},
                               {"nmi", r.clustering->nmi}};
    }
    if (r.classification) j["classification"] = cv_json(*r.classification);
    if (r.reconstruction) j["reconstruction"] = cv_json(*r.reconstruction);
    return dump(j);
}

std::string metrics_csv_header() { return "dataset,method,teacher,p,acc,nmi,clf_acc,mse,seed\n"; }

std::string metrics_csv_row(const MetricReport& r) {
    std::string row = csv_field(r.dataset) + "," + csv_field(r.method) + "," + csv_field(r.teacher) + "," +
                      format_double(r.percent) + ",";
    row += (r.clustering ? format_double(r.clustering->acc_mean) : "") + ",";
    row += (r.clustering ? format_double(r.clustering->nmi_mean) : "") + ",";
    row += (r.classification ? format_double(r.classification->mean) : "") + ",";
    row += (r.reconstruction ? format_double(r.reconstruction->mean) : "") + ",";
    row += std::to_string(r.seed) + "\n";
    return row;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string index_list(const std::vector<std::size_t>& indices) {
    std::string out;
    for (std::size_t i : indices) out += std::to_string(i) + "\n";
    return out;
}

}  // namespace tsfs
