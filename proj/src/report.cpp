#include "cubemorse/report.hpp"

#include <sstream>

#include "cubemorse/error.hpp"

namespace cubemorse::report {

using nlohmann::json;

json to_json(const RunResult& r) {
    json j;
    j["command"] = r.command;
    j["args"] = r.args;
    j["cell_count"] = r.cell_count;
    if (r.betti) j["betti"] = *r.betti;
    j["rounds"] = r.rounds;
    j["round_sizes"] = r.round_sizes;
    if (r.conley) {
        const auto& c = *r.conley;
        json cells = json::array();
        for (const auto& e : c.cells) cells.push_back({{"grade", e.grade}, {"dim", e.dim}, {"count", e.count}});
        j["conley"] = {{"top_cubes", c.top_cubes},         {"scc_count", c.scc_count},
                       {"first_round_cells", c.first_round_cells}, {"conley_cells", c.conley_cells},
                       {"tower_height", c.tower_height},   {"cells", cells},
                       {"boundary", c.boundary}};
    }
    if (!r.checks.empty()) j["checks"] = r.checks;
    if (!r.counts.empty()) j["counts"] = r.counts;
    j["timing_ms"] = r.timing_ms;
    if (r.bench) {
        j["bench"] = {{"repeat", r.bench->repeat},
                      {"mean_ms", r.bench->mean_ms},
                      {"stddev_ms", r.bench->stddev_ms},
                      {"runs_ms", r.bench->runs_ms}};
    }
    return j;
}

RunResult from_json(const json& j) {
    RunResult r;
    try {
        r.command = j.at("command").get<std::string>();
        r.args = j.at("args").get<std::vector<std::string>>();
        r.cell_count = j.at("cell_count").get<std::uint64_t>();
        if (j.contains("betti")) r.betti = j["betti"].get<std::vector<std::uint64_t>>();
        r.rounds = j.at("rounds").get<unsigned>();
        r.round_sizes = j.at("round_sizes").get<std::vector<std::uint64_t>>();
        if (j.contains("conley")) {
            const auto& c = j["conley"];
            ConleySummary s;
            s.top_cubes = c.at("top_cubes").get<std::uint64_t>();
            s.scc_count = c.at("scc_count").get<std::uint64_t>();
            s.first_round_cells = c.at("first_round_cells").get<std::uint64_t>();
            s.conley_cells = c.at("conley_cells").get<std::uint64_t>();
            s.tower_height = c.at("tower_height").get<unsigned>();
            for (const auto& e : c.at("cells")) {
                s.cells.push_back({e.at("grade").get<GradeId>(), e.at("dim").get<unsigned>(),
                                   e.at("count").get<std::uint64_t>()});
            }
            s.boundary = c.at("boundary").get<std::vector<std::array<std::uint64_t, 3>>>();
            r.conley = std::move(s);
        }
        if (j.contains("checks")) r.checks = j["checks"].get<std::map<std::string, bool>>();
        if (j.contains("counts")) r.counts = j["counts"].get<std::map<std::string, std::uint64_t>>();
        r.timing_ms = j.at("timing_ms").get<double>();
        if (j.contains("bench")) {
            const auto& b = j["bench"];
            r.bench = BenchSummary{b.at("repeat").get<unsigned>(), b.at("mean_ms").get<double>(),
                                   b.at("stddev_ms").get<double>(), b.at("runs_ms").get<std::vector<double>>()};
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("run result: ") + e.what());
    }
    return r;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        const json& v = it.value();
        if (v.is_object()) {
            flatten(v, key, out);
        } else if (v.is_string()) {
            out << key << ',' << csv_escape(v.get<std::string>()) << '\n';
        } else {
            out << key << ',' << csv_escape(v.dump()) << '\n';
        }
    }
}

// Splits one CSV record with two fields.
std::pair<std::string, std::string> split_record(const std::string& line) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("csv: record without a comma: " + line);
    std::string key = line.substr(0, comma);
    std::string rest = line.substr(comma + 1);
    if (rest.empty() || rest.front() != '"') return {key, rest};
    std::string value;
    for (std::size_t i = 1; i < rest.size(); ++i) {
        if (rest[i] == '"') {
            if (i + 1 < rest.size() && rest[i + 1] == '"') {
                value += '"';
                ++i;
            } else {
                break;
            }
        } else {
            value += rest[i];
        }
    }
    return {key, value};
}

}  // namespace

std::string to_csv(const RunResult& r) {
    std::ostringstream out;
    out << "field,value\n";
    flatten(to_json(r), "", out);
    return out.str();
}

RunResult from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    json j = json::object();
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line == "field,value") continue;
        }
        auto [key, value] = split_record(line);
        json* node = &j;
        std::size_t start = 0;
        while (true) {
            const auto dot = key.find('.', start);
            if (dot == std::string::npos) break;
            node = &(*node)[key.substr(start, dot - start)];
            start = dot + 1;
        }
        const std::string leaf = key.substr(start);
        if (key == "command") {
            (*node)[leaf] = value;
        } else {
            json parsed = json::parse(value, nullptr, false);
            (*node)[leaf] = parsed.is_discarded() ? json(value) : parsed;
        }
    }
    return from_json(j);
}

std::string to_text(const RunResult& r) {
    std::ostringstream out;
    out << r.command << ": " << r.cell_count << " cells";
    if (r.betti) {
        out << ", betti (";
        for (std::size_t k = 0; k < r.betti->size(); ++k) out << (k ? "," : "") << (*r.betti)[k];
        out << ")";
    }
    if (r.rounds) {
        out << ", " << r.rounds << " round" << (r.rounds == 1 ? "" : "s") << " (";
        for (std::size_t k = 0; k < r.round_sizes.size(); ++k) out << (k ? " -> " : "") << r.round_sizes[k];
        out << ")";
    }
    out << '\n';
    if (r.conley) {
        const auto& c = *r.conley;
        out << "  top cubes " << c.top_cubes << ", components " << c.scc_count << ", first round "
            << c.first_round_cells << ", conley " << c.conley_cells << ", tower " << c.tower_height << '\n';
    }
    for (const auto& [name, ok] : r.checks) out << "  " << name << ": " << (ok ? "ok" : "FAILED") << '\n';
    for (const auto& [name, n] : r.counts) out << "  " << name << " = " << n << '\n';
    if (r.bench) {
        out << "  " << r.bench->repeat << " runs, mean " << r.bench->mean_ms << " ms, stddev " << r.bench->stddev_ms
            << " ms\n";
    } else {
        out << "  " << r.timing_ms << " ms\n";
    }
    return out.str();
}

json complex_json(const ExplicitComplex& complex, const std::vector<std::pair<GradeId, GradeId>>& poset_edges) {
    json cells = json::array();
    json boundary = json::array();
    for (std::size_t k = 0; k < complex.cell_count(); ++k) {
        const auto& c = complex.cell(k);
        json cell = {{"id", c.ref}, {"dim", c.dim}};
        if (c.grade) cell["grade"] = *c.grade;
        cells.push_back(std::move(cell));
        for (std::uint32_t f : complex.face_indices(k)) boundary.push_back({complex.cell(f).ref, c.ref});
    }
    json j = {{"cells", cells}, {"boundary", boundary}};
    if (!poset_edges.empty()) {
        json edges = json::array();
        for (auto [p, q] : poset_edges) edges.push_back({p, q});
        j["poset_edges"] = edges;
    }
    return j;
}

}  // namespace cubemorse::report
