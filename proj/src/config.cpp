#include "expforge/config.hpp"

#include "expforge/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace expforge {

using nlohmann::json;

namespace {

class Collector {
public:
    void add(const std::string& path, const std::string& what) { issues_.push_back(path + ": " + what); }
    bool empty() const { return issues_.empty(); }
    [[noreturn]] void raise() { throw ConfigError(std::move(issues_)); }

private:
    std::vector<std::string> issues_;
};

std::optional<std::vector<std::string>> read_labels(const json& j, const std::string& path, Collector& c) {
    if (!j.is_array() || j.empty()) {
        c.add(path, "expected a nonempty array of strings");
        return std::nullopt;
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_string() || j[i].get<std::string>().empty()) {
            c.add(p, "expected a nonempty string");
            continue;
        }
        const auto s = j[i].get<std::string>();
        if (!seen.insert(s).second) c.add(p, "duplicate label '" + s + "'");
        out.push_back(s);
    }
    return out;
}

std::optional<std::vector<double>> read_numbers(const json& j, const std::string& path, Collector& c) {
    if (!j.is_array()) {
        c.add(path, "expected an array of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            c.add(path + "[" + std::to_string(i) + "]", "expected a number");
            ok = false;
            continue;
        }
        out.push_back(j[i].get<double>());
    }
    if (!ok) return std::nullopt;
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void check_thresholds(const std::vector<double>& v, std::size_t m_count, const std::string& path, Collector& c) {
    if (m_count > 0 && v.size() != m_count)
        c.add(path, "expected " + std::to_string(m_count) + " entries, got " + std::to_string(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || !(v[i] > 0.0))
            c.add(path + "[" + std::to_string(i) + "]", "threshold must be finite and positive");
    }
}

}  // namespace

ModelConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    Collector c;
    if (!root.is_object()) {
        c.add("(root)", "expected a JSON object");
        c.raise();
    }
    ModelConfig cfg;

    if (!root.contains("alphabet")) {
        c.add("alphabet", "required");
    } else if (auto labels = read_labels(root["alphabet"], "alphabet", c)) {
        cfg.alphabet = std::move(*labels);
        if (cfg.alphabet.size() < 2) c.add("alphabet", "needs at least two symbols");
    }
    if (root.contains("states")) {
        if (auto labels = read_labels(root["states"], "states", c)) cfg.states = std::move(*labels);
    }

    if (!root.contains("hypotheses")) {
        c.add("hypotheses", "required");
    } else if (!root["hypotheses"].is_array()) {
        c.add("hypotheses", "expected an array");
    } else {
        const json& hyps = root["hypotheses"];
        if (hyps.size() < 2) c.add("hypotheses", "at least two hypotheses are required");
        for (std::size_t m = 0; m < hyps.size(); ++m) {
            const std::string hp = "hypotheses[" + std::to_string(m) + "]";
            const json& h = hyps[m];
            if (!h.is_object()) {
                c.add(hp, "expected an object");
                continue;
            }
            HypothesisConfig hc;
            if (!h.contains("name") || !h["name"].is_string()) {
                c.add(hp + ".name", "expected a string");
            } else {
                hc.name = h["name"].get<std::string>();
            }
            if (!h.contains("matrix") || !h["matrix"].is_array()) {
                c.add(hp + ".matrix", "expected an array of rows");
            } else {
                const json& mat = h["matrix"];
                if (mat.size() != cfg.states.size())
                    c.add(hp + ".matrix", "expected " + std::to_string(cfg.states.size()) + " rows (one per state), got " +
                                              std::to_string(mat.size()));
                for (std::size_t s = 0; s < mat.size(); ++s) {
                    const std::string rp = hp + ".matrix[" + std::to_string(s) + "]";
                    auto row = read_numbers(mat[s], rp, c);
                    if (!row) continue;
                    if (!cfg.alphabet.empty() && row->size() != cfg.alphabet.size())
                        c.add(rp, "expected " + std::to_string(cfg.alphabet.size()) + " entries, got " +
                                      std::to_string(row->size()));
                    double total = 0.0;
                    bool entries_ok = true;
                    for (std::size_t x = 0; x < row->size(); ++x) {
                        const double v = (*row)[x];
                        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                            c.add(rp + "[" + std::to_string(x) + "]", "probability must lie in [0,1]");
                            entries_ok = false;
                        }
                        total += v;
                    }
                    if (entries_ok && std::abs(total - 1.0) > kSimplexTolerance)
                        c.add(rp, "row sums to " + fmt(total) + ", expected 1");
                    hc.matrix.push_back(std::move(*row));
                }
            }
            cfg.hypotheses.push_back(std::move(hc));
        }
    }

    if (root.contains("thresholds")) {
        const json& t = root["thresholds"];
        if (!t.is_object()) {
            c.add("thresholds", "expected an object");
        } else {
            ThresholdConfig& tc = cfg.thresholds.emplace();
            if (!t.contains("E")) {
                c.add("thresholds.E", "required");
            } else if (auto e = read_numbers(t["E"], "thresholds.E", c)) {
                check_thresholds(*e, cfg.hypotheses.size(), "thresholds.E", c);
                tc.E = std::move(*e);
            }
            if (t.contains("E_R")) {
                if (auto er = read_numbers(t["E_R"], "thresholds.E_R", c)) {
                    check_thresholds(*er, cfg.hypotheses.size(), "thresholds.E_R", c);
                    tc.E_R = std::move(*er);
                }
            }
        }
    }

    if (root.contains("numeric")) {
        const json& n = root["numeric"];
        if (!n.is_object()) {
            c.add("numeric", "expected an object");
        } else {
            if (n.contains("grid_denominator")) {
                if (!n["grid_denominator"].is_number_integer() || n["grid_denominator"].get<long long>() < 1)
                    c.add("numeric.grid_denominator", "expected an integer >= 1");
                else
                    cfg.numeric.grid_denominator = n["grid_denominator"].get<int>();
            }
            if (n.contains("tol")) {
                if (!n["tol"].is_number() || !(n["tol"].get<double>() > 0.0))
                    c.add("numeric.tol", "expected a positive number");
                else
                    cfg.numeric.tol = n["tol"].get<double>();
            }
            if (n.contains("type_cap")) {
                if (!n["type_cap"].is_number_integer() || n["type_cap"].get<long long>() < 1)
                    c.add("numeric.type_cap", "expected an integer >= 1");
                else
                    cfg.numeric.type_cap = n["type_cap"].get<std::size_t>();
            }
        }
    }

    if (!c.empty()) c.raise();
    return cfg;
}

ModelConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open config file"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ModelConfig& cfg) {
    json root;
    root["alphabet"] = cfg.alphabet;
    root["states"] = cfg.states;
    root["hypotheses"] = json::array();
    for (const auto& h : cfg.hypotheses) root["hypotheses"].push_back({{"name", h.name}, {"matrix", h.matrix}});
    if (cfg.thresholds) {
        json t;
        t["E"] = cfg.thresholds->E;
        if (cfg.thresholds->E_R) t["E_R"] = *cfg.thresholds->E_R;
        root["thresholds"] = t;
    }
    root["numeric"] = {{"grid_denominator", cfg.numeric.grid_denominator},
                       {"tol", cfg.numeric.tol},
                       {"type_cap", cfg.numeric.type_cap}};
    return root.dump(2) + "\n";
}

HypothesisSet ModelConfig::hypothesis_set() const {
    std::vector<ConditionalFamily> families;
    for (const auto& h : hypotheses) {
        std::vector<Distribution> rows;
        for (const auto& r : h.matrix)
            rows.emplace_back(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
        families.emplace_back(h.name, std::move(rows));
    }
    return HypothesisSet(Alphabet(alphabet), StateSet(states), std::move(families));
}

ExponentSpec ModelConfig::exponent_spec() const {
    if (!thresholds) throw ConfigError({"thresholds.E required"});
    return ExponentSpec{thresholds->E, thresholds->E_R};
}

}  // namespace expforge
