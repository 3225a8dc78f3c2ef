#pragma once

#include "weakot/measures.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace weakot {

/// Measure schema: {"atoms": [..], "weights": [..]?}; omitted weights mean
/// uniform. A bare JSON array is accepted as atoms.
DiscreteMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const DiscreteMeasure& mu);

/// CSV: two columns atom,weight (weight optional => uniform), header
/// optional.
DiscreteMeasure measure_from_csv(std::istream& in);

/// Load from a file path (.csv suffix selects CSV) or from inline JSON
/// when the text starts with '{' or '['.
DiscreteMeasure load_measure(const std::string& path_or_inline);

/// Vector argument: inline JSON array or a path to a JSON array file.
VectorXd load_vector(const std::string& path_or_inline);

nlohmann::json vector_to_json(const Eigen::Ref<const VectorXd>& v);
VectorXd vector_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Extended reals: finite numbers pass through, +-inf encode as strings so
/// reports stay valid JSON and round-trip exactly.
nlohmann::json ext_real_to_json(double x);
double ext_real_from_json(const nlohmann::json& j);

} // namespace weakot
