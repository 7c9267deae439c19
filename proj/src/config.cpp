#include "gscr/config.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gscr {

using nlohmann::json;

std::string_view to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::Analyze: return "analyze";
        case Experiment::Sweep: return "sweep";
        case Experiment::Contour: return "contour";
        case Experiment::Boundary: return "boundary";
        case Experiment::Study: return "study";
    }
    return "";
}

std::optional<Experiment> parse_experiment(std::string_view name) noexcept {
    for (auto e : {Experiment::Analyze, Experiment::Sweep, Experiment::Contour,
                   Experiment::Boundary, Experiment::Study}) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

bool StudyConfig::wants(OutputFormat f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
}

namespace {

[[noreturn]] void schema_error(std::string const& field, std::string const& what) {
    throw Error(ErrorCode::SchemaError, field + ": " + what);
}

void check_keys(json const& obj, std::string const& where, std::set<std::string> const& allowed) {
    for (auto const& [key, _] : obj.items()) {
        if (!allowed.contains(key)) schema_error(where + "." + key, "unknown field");
    }
}

json const& require_object(json const& parent, std::string const& key, std::string const& where) {
    if (!parent.contains(key)) schema_error(where + "." + key, "missing required field");
    auto const& v = parent.at(key);
    if (!v.is_object()) schema_error(where + "." + key, "expected an object");
    return v;
}

json const& require_array(json const& parent, std::string const& key, std::string const& where) {
    if (!parent.contains(key)) schema_error(where + "." + key, "missing required field");
    auto const& v = parent.at(key);
    if (!v.is_array()) schema_error(where + "." + key, "expected an array");
    return v;
}

double as_number(json const& v, std::string const& field) {
    if (!v.is_number()) schema_error(field, "expected a number");
    double const d = v.get<double>();
    if (!std::isfinite(d)) schema_error(field, "expected a finite number");
    return d;
}

double as_positive(json const& v, std::string const& field) {
    double const d = as_number(v, field);
    if (!(d > 0.0)) schema_error(field, "must be > 0");
    return d;
}

std::string as_string(json const& v, std::string const& field) {
    if (!v.is_string()) schema_error(field, "expected a string");
    auto s = v.get<std::string>();
    if (s.empty()) schema_error(field, "must not be empty");
    return s;
}

int as_int(json const& v, std::string const& field) {
    if (!v.is_number_integer()) schema_error(field, "expected an integer");
    return v.get<int>();
}

// Absent and null both mean "not set".
json const* optional_field(json const& obj, std::string const& key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

std::pair<int, int> line_column(std::string const& text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void parse_network(json const& root, StudyConfig& cfg) {
    auto const& net = require_object(root, "network", "$");
    check_keys(net, "$.network", {"buses", "branches"});

    auto const& buses = require_array(net, "buses", "$.network");
    if (buses.empty()) schema_error("$.network.buses", "at least one bus is required");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < buses.size(); ++i) {
        auto const where = "$.network.buses[" + std::to_string(i) + "]";
        auto const& b = buses[i];
        if (!b.is_object()) schema_error(where, "expected an object");
        check_keys(b, where, {"id", "thevenin_x", "p_rated", "t_param"});
        if (!b.contains("id")) schema_error(where + ".id", "missing required field");

        BusSpec bus;
        bus.id = as_string(b.at("id"), where + ".id");
        if (!ids.insert(bus.id).second) schema_error(where + ".id", "duplicate bus id '" + bus.id + "'");
        if (auto const* tx = optional_field(b, "thevenin_x")) {
            bus.thevenin_x = as_positive(*tx, where + ".thevenin_x");
        }
        auto const* p = optional_field(b, "p_rated");
        auto const* t = optional_field(b, "t_param");
        if ((p == nullptr) != (t == nullptr)) {
            schema_error(where, "p_rated and t_param must be given together (converter bus) or not at all");
        }
        bus.is_converter = p != nullptr;
        if (bus.is_converter) {
            cfg.converters.push_back(BusConverter{as_positive(*p, where + ".p_rated"),
                                                  as_number(*t, where + ".t_param")});
        } else {
            cfg.converters.push_back(std::nullopt);
        }
        cfg.network.buses.push_back(std::move(bus));
    }

    json const empty = json::array();
    json const* branches = &empty;
    if (net.contains("branches")) branches = &require_array(net, "branches", "$.network");
    for (std::size_t i = 0; i < branches->size(); ++i) {
        auto const where = "$.network.branches[" + std::to_string(i) + "]";
        auto const& br = (*branches)[i];
        if (!br.is_object()) schema_error(where, "expected an object");
        check_keys(br, where, {"from", "to", "x"});
        for (auto const* key : {"from", "to", "x"}) {
            if (!br.contains(key)) schema_error(where + "." + key, "missing required field");
        }
        Branch branch{as_string(br.at("from"), where + ".from"), as_string(br.at("to"), where + ".to"),
                      as_positive(br.at("x"), where + ".x")};
        for (auto const* end : {&branch.from, &branch.to}) {
            if (!ids.contains(*end)) throw Error(ErrorCode::CrossRefError, *end);
        }
        if (branch.from == branch.to) schema_error(where, "branch connects bus '" + branch.from + "' to itself");
        cfg.network.branches.push_back(std::move(branch));
    }
    cfg.network = merge_parallel(cfg.network);

    if (std::none_of(cfg.converters.begin(), cfg.converters.end(),
                     [](auto const& c) { return c.has_value(); })) {
        schema_error("$.network.buses", "no converter bus (p_rated/t_param) given");
    }
}

void check_bus_ref(StudyConfig const& cfg, std::string const& id) {
    auto idx = cfg.network.index_of(id);
    if (!idx) throw Error(ErrorCode::CrossRefError, id);
    if (!cfg.converters[*idx]) {
        throw Error(ErrorCode::CrossRefError, id + " (not a converter bus)");
    }
}

void parse_params(json const& root, StudyConfig& cfg) {
    auto const* pj = optional_field(root, "parameters");
    if (pj == nullptr) return;
    if (!pj->is_object()) schema_error("$.parameters", "expected an object");
    auto const& p = *pj;
    std::string const w = "$.parameters";
    check_keys(p, w, {"bus", "from", "to", "steps", "tol", "t_ref", "targets", "solve_bus",
                      "grid_bus", "grid", "t_rows"});
    auto& out = cfg.params;

    if (auto const* v = optional_field(p, "bus")) out.bus = as_string(*v, w + ".bus");
    if (auto const* v = optional_field(p, "from")) out.from = as_positive(*v, w + ".from");
    if (auto const* v = optional_field(p, "to")) out.to = as_positive(*v, w + ".to");
    if (auto const* v = optional_field(p, "steps")) out.steps = as_int(*v, w + ".steps");
    if (auto const* v = optional_field(p, "tol")) out.tol = as_positive(*v, w + ".tol");
    if (auto const* v = optional_field(p, "t_ref")) {
        auto s = as_string(*v, w + ".t_ref");
        if (s == "t_star") {
            out.t_ref = TRef::TStar;
        } else if (s == "mean") {
            out.t_ref = TRef::Mean;
        } else {
            schema_error(w + ".t_ref", "expected \"t_star\" or \"mean\"");
        }
    }
    if (auto const* v = optional_field(p, "targets")) {
        if (!v->is_array() || v->empty()) schema_error(w + ".targets", "expected a non-empty array");
        out.targets.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto const& t = (*v)[i];
            auto const field = w + ".targets[" + std::to_string(i) + "]";
            try {
                out.targets.push_back(ContourTarget::parse(
                    t.is_string() ? t.get<std::string>() : t.is_number() ? t.dump() : std::string{}));
            } catch (Error const& e) {
                schema_error(field, e.what());
            }
        }
    }
    if (auto const* v = optional_field(p, "solve_bus")) out.solve_bus = as_string(*v, w + ".solve_bus");
    if (auto const* v = optional_field(p, "grid_bus")) out.grid_bus = as_string(*v, w + ".grid_bus");
    if (auto const* v = optional_field(p, "grid")) {
        if (!v->is_object()) schema_error(w + ".grid", "expected an object");
        check_keys(*v, w + ".grid", {"from", "to", "steps"});
        if (auto const* g = optional_field(*v, "from")) out.grid.from = as_positive(*g, w + ".grid.from");
        if (auto const* g = optional_field(*v, "to")) out.grid.to = as_positive(*g, w + ".grid.to");
        if (auto const* g = optional_field(*v, "steps")) out.grid.steps = as_int(*g, w + ".grid.steps");
    }
    if (auto const* v = optional_field(p, "t_rows")) {
        if (!v->is_array()) schema_error(w + ".t_rows", "expected an array of rows");
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto const field = w + ".t_rows[" + std::to_string(i) + "]";
            auto const& row = (*v)[i];
            if (!row.is_array()) schema_error(field, "expected an array of numbers");
            std::vector<double> values;
            for (std::size_t k = 0; k < row.size(); ++k) {
                values.push_back(as_number(row[k], field + "[" + std::to_string(k) + "]"));
            }
            out.t_rows.push_back(std::move(values));
        }
    }
}

void validate_params(StudyConfig const& cfg) {
    auto const& p = cfg.params;
    std::string const w = "$.parameters";
    if (p.bus) check_bus_ref(cfg, *p.bus);
    if (p.solve_bus) check_bus_ref(cfg, *p.solve_bus);
    if (p.grid_bus) check_bus_ref(cfg, *p.grid_bus);
    if (p.to && !(p.from < *p.to)) schema_error(w + ".to", "range must satisfy from < to");
    if (p.steps < 2) schema_error(w + ".steps", "must be at least 2");
    if (!(p.grid.from <= p.grid.to)) schema_error(w + ".grid", "must satisfy from <= to");
    if (p.grid.steps < 1) schema_error(w + ".grid.steps", "must be at least 1");

    std::size_t converters = 0;
    for (auto const& c : cfg.converters) converters += c.has_value();
    for (std::size_t i = 0; i < p.t_rows.size(); ++i) {
        if (p.t_rows[i].size() != converters) {
            schema_error(w + ".t_rows[" + std::to_string(i) + "]",
                         "expected " + std::to_string(converters) + " values, one per converter bus");
        }
    }
}

std::vector<std::string> converter_ids(StudyConfig const& cfg) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < cfg.network.buses.size(); ++i) {
        if (cfg.converters[i]) ids.push_back(cfg.network.buses[i].id);
    }
    return ids;
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json string_or_null(std::optional<std::string> const& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

StudyConfig parse_config(std::string const& text, std::string const& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (json::parse_error const& e) {
        auto [line, col] = line_column(text, e.byte);
        throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ":" +
                                               std::to_string(col) + ": invalid JSON");
    }
    if (!root.is_object()) schema_error("$", "expected a JSON object at top level");
    check_keys(root, "$", {"network", "experiment", "parameters", "output", "formats"});

    StudyConfig cfg;
    parse_network(root, cfg);

    if (auto const* v = optional_field(root, "experiment")) {
        auto name = as_string(*v, "$.experiment");
        auto e = parse_experiment(name);
        if (!e) schema_error("$.experiment", "unknown experiment '" + name + "'");
        cfg.experiment = *e;
    }
    parse_params(root, cfg);
    if (auto const* v = optional_field(root, "output")) cfg.output = as_string(*v, "$.output");
    if (auto const* v = optional_field(root, "formats")) {
        if (!v->is_array()) schema_error("$.formats", "expected an array");
        cfg.formats.clear();
        for (auto const& f : *v) {
            auto s = as_string(f, "$.formats[]");
            OutputFormat fmt = OutputFormat::Csv;
            if (s == "report") {
                fmt = OutputFormat::Report;
            } else if (s != "csv") {
                schema_error("$.formats", "unknown format '" + s + "'");
            }
            if (std::find(cfg.formats.begin(), cfg.formats.end(), fmt) == cfg.formats.end()) {
                cfg.formats.push_back(fmt);
            }
        }
        std::sort(cfg.formats.begin(), cfg.formats.end());
    }
    validate_params(cfg);
    return cfg;
}

StudyConfig load_config(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

void check_experiment(StudyConfig const& cfg) {
    validate_params(cfg);
    auto const ids = converter_ids(cfg);
    auto const& p = cfg.params;
    switch (cfg.experiment) {
        case Experiment::Analyze:
            break;
        case Experiment::Sweep:
        case Experiment::Boundary:
            if (!p.to) schema_error("$.parameters.to", "required for " + std::string(to_string(cfg.experiment)));
            break;
        case Experiment::Study:
            if (p.t_rows.empty()) schema_error("$.parameters.t_rows", "required for study");
            [[fallthrough]];
        case Experiment::Contour:
            if (ids.size() < 2 && !(p.solve_bus && p.grid_bus)) {
                schema_error("$.parameters", "contours need two converter buses");
            }
            if (p.solve_bus && p.grid_bus && *p.solve_bus == *p.grid_bus) {
                schema_error("$.parameters.grid_bus", "must differ from solve_bus");
            }
            break;
    }
}

std::string canonical_json(StudyConfig const& cfg) {
    json buses = json::array();
    for (std::size_t i = 0; i < cfg.network.buses.size(); ++i) {
        auto const& b = cfg.network.buses[i];
        json jb{{"id", b.id}, {"thevenin_x", number_or_null(b.thevenin_x)}};
        if (auto const& c = cfg.converters[i]) {
            jb["p_rated"] = c->p_rated;
            jb["t_param"] = c->t_param;
        } else {
            jb["p_rated"] = nullptr;
            jb["t_param"] = nullptr;
        }
        buses.push_back(std::move(jb));
    }
    json branches = json::array();
    for (auto const& br : cfg.network.branches) {
        branches.push_back({{"from", br.from}, {"to", br.to}, {"x", br.x}});
    }

    auto const& p = cfg.params;
    json targets = json::array();
    for (auto const& t : p.targets) {
        if (t.kind == ContourTarget::Kind::Gscr) {
            targets.push_back(t.value);
        } else {
            targets.push_back(t.label());
        }
    }
    json formats = json::array();
    for (auto f : cfg.formats) formats.push_back(f == OutputFormat::Report ? "report" : "csv");

    json root{
        {"network", {{"buses", buses}, {"branches", branches}}},
        {"experiment", std::string(to_string(cfg.experiment))},
        {"parameters",
         {{"bus", string_or_null(p.bus)},
          {"from", p.from},
          {"to", number_or_null(p.to)},
          {"steps", p.steps},
          {"tol", p.tol},
          {"t_ref", std::string(to_string(p.t_ref))},
          {"targets", targets},
          {"solve_bus", string_or_null(p.solve_bus)},
          {"grid_bus", string_or_null(p.grid_bus)},
          {"grid", {{"from", p.grid.from}, {"to", p.grid.to}, {"steps", p.grid.steps}}},
          {"t_rows", p.t_rows}}},
        {"output", cfg.output.generic_string()},
        {"formats", formats},
    };
    return root.dump();
}

std::string config_hash(StudyConfig const& cfg) {
    auto const text = canonical_json(cfg);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

AnalysisInputs analysis_inputs(StudyConfig const& cfg) {
    AnalysisInputs in;
    in.network = reduce_to_converters(cfg.network);
    for (auto const& bus : in.network.buses) {
        auto const& c = cfg.converters[*cfg.network.index_of(bus.id)];
        in.converters.rated_power.push_back(c->p_rated);
        in.converters.control.push_back(c->t_param);
    }
    return in;
}

}  // namespace gscr
