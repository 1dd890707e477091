#pragma once

// JSON (de)serialization of the library's value types.

#include <string>

#include <json.hpp>

#include "drmpc/roa.hpp"
#include "drmpc/simulator.hpp"

namespace drmpc::io {

using Json = nlohmann::json;

Json to_json(const Mat& m);
Json to_json(const Vec& v);
Mat matrix_from_json(const Json& j, const std::string& what);
Vec vector_from_json(const Json& j, const std::string& what);

Json to_json(const PolytopeH& p);
Json to_json(const PolytopeV& p);
PolytopeH polytope_h_from_json(const Json& j, const std::string& what);
PolytopeV polytope_v_from_json(const Json& j, const std::string& what);

Json to_json(const LpvModel& m);
LpvModel model_from_json(const Json& j);

Json to_json(const DeadbeatPolicy& p);
DeadbeatPolicy policy_from_json(const Json& j);

Json to_json(const TightenedSets& s);
Json to_json(const SimTrace& t);
Json to_json(const RincTable& t);
Json to_json(const RoaResult& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Hex digest of the compact dump (std::hash; stable within one build).
std::string content_hash(const Json& j);

}  // namespace drmpc::io
