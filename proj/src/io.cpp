#include "weakot/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace weakot {

using nlohmann::json;

DiscreteMeasure measure_from_json(const json& j) {
    if (j.is_array()) {
        VectorXd atoms = vector_from_json(j);
        return DiscreteMeasure(atoms);
    }
    if (!j.is_object() || !j.contains("atoms"))
        throw std::invalid_argument("measure JSON: expected {\"atoms\": [..], \"weights\"?}");
    VectorXd atoms = vector_from_json(j.at("atoms"));
    if (!j.contains("weights")) return DiscreteMeasure(atoms);
    VectorXd weights = vector_from_json(j.at("weights"));
    return DiscreteMeasure(atoms, weights);
}

json measure_to_json(const DiscreteMeasure& mu) {
    return json{{"atoms", vector_to_json(mu.atoms())}, {"weights", vector_to_json(mu.weights())}};
}

DiscreteMeasure measure_from_csv(std::istream& in) {
    std::vector<double> atoms;
    std::vector<double> weights;
    bool has_weights = false;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.empty()) continue;
        try {
            const double atom = std::stod(cells[0]);
            atoms.push_back(atom);
            if (cells.size() > 1) {
                weights.push_back(std::stod(cells[1]));
                has_weights = true;
            }
        } catch (const std::exception&) {
            if (first) {
                first = false;
                continue; // header row
            }
            throw std::invalid_argument("measure CSV: non-numeric cell in '" + line + "'");
        }
        first = false;
    }
    if (atoms.empty()) throw std::invalid_argument("measure CSV: no rows");
    VectorXd a = Eigen::Map<const VectorXd>(atoms.data(), static_cast<Eigen::Index>(atoms.size()));
    if (!has_weights) return DiscreteMeasure(a);
    if (weights.size() != atoms.size())
        throw std::invalid_argument("measure CSV: weight column is incomplete");
    VectorXd w =
        Eigen::Map<const VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return DiscreteMeasure(a, w);
}

namespace {

bool looks_inline(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' || c == '[';
    }
    return false;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

DiscreteMeasure load_measure(const std::string& path_or_inline) {
    if (looks_inline(path_or_inline)) return measure_from_json(json::parse(path_or_inline));
    std::ifstream in(path_or_inline);
    if (!in) throw std::invalid_argument("cannot open measure file: " + path_or_inline);
    if (ends_with(path_or_inline, ".csv")) return measure_from_csv(in);
    json j;
    in >> j;
    return measure_from_json(j);
}

VectorXd load_vector(const std::string& path_or_inline) {
    if (looks_inline(path_or_inline)) return vector_from_json(json::parse(path_or_inline));
    std::ifstream in(path_or_inline);
    if (!in) throw std::invalid_argument("cannot open vector file: " + path_or_inline);
    json j;
    in >> j;
    return vector_from_json(j);
}

json vector_to_json(const Eigen::Ref<const VectorXd>& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index k = 0;
    for (const auto& item : j) {
        if (!item.is_number()) throw std::invalid_argument("expected a JSON array of numbers");
        v(k++) = item.get<double>();
    }
    return v;
}

json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i)));
    return rows;
}

json ext_real_to_json(double x) {
    if (std::isfinite(x)) return x;
    return x > 0 ? json("inf") : json("-inf");
}

double ext_real_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("expected a number or \"inf\"/\"-inf\"");
}

} // namespace weakot
