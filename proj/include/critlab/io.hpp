#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "critlab/criticality.hpp"
#include "critlab/gap.hpp"
#include "critlab/green.hpp"
#include "critlab/grid.hpp"
#include "critlab/varcrit.hpp"

namespace critlab {

// Field CSV: header index,x[,y[,z]],value, one row per active node.
std::string field_csv(const Domain& d, const GridFunction& f);
void write_field_csv(const std::filesystem::path& file, const Domain& d, const GridFunction& f);
// Rows are matched by index; coordinates must agree with the grid to h/1000.
GridFunction read_field_csv(const std::filesystem::path& file, const Domain& d);

void write_text(const std::filesystem::path& file, const std::string& text);

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
nlohmann::json num(double v);
nlohmann::json nums(const std::vector<double>& v);

nlohmann::json to_json(const Extrapolation& e);
nlohmann::json to_json(const NonnegativityReport& r);
nlohmann::json to_json(const GreenGrowth& g);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const GroundState& g);  // without the fields themselves
nlohmann::json to_json(const NullSequenceReport& r);
nlohmann::json to_json(const Lambda0Estimate& e);
nlohmann::json to_json(const GapCertificate& c);
nlohmann::json to_json(const WeightConstruction& w);
nlohmann::json to_json(const PoincareCertificate& c);
nlohmann::json to_json(const std::vector<PairingPoint>& p);
nlohmann::json to_json(const Minimizer& m);
nlohmann::json to_json(const RefinementCheck& r);

nlohmann::json error_json(const std::string& code, const std::string& message);

}  // namespace critlab
