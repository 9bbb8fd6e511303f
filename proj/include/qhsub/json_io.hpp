#ifndef QHSUB_JSON_IO_HPP
#define QHSUB_JSON_IO_HPP

#include <json.hpp>

#include "qhsub/certify.hpp"
#include "qhsub/decay.hpp"

namespace qhsub {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const Rational& r);
ordered_json to_json(const CirclePoint& c);
ordered_json to_json(const Sector& s);
ordered_json to_json(const GridSpec& g);
ordered_json to_json(const H2Verdict& v);
ordered_json to_json(const SectorPlan& p);
ordered_json to_json(const Certificate& c);
ordered_json to_json(const DecayReport& r);

GridSpec grid_from_json(const ordered_json& j);
SectorPlan plan_from_json(const ordered_json& j);
Certificate certificate_from_json(const ordered_json& j);

}  // namespace qhsub

#endif
