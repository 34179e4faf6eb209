#pragma once

// Internal JSON (de)serialization helpers shared by config.cpp and
// artifacts.cpp; keeps vendor/json.hpp out of the public headers.

#include <string>

#include <json.hpp>

#include "shapelab/config.hpp"

namespace shapelab::detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

inline const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(where + "/" + key, "missing required field");
    return *it;
}

inline double need_num(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) fail(where + "/" + key, "expected a number");
    return v.get<double>();
}

inline double opt_num(const json& j, const char* key, const std::string& where, double def) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_number()) fail(where + "/" + key, "expected a number");
    return j.at(key).get<double>();
}

inline int need_int(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number_integer()) fail(where + "/" + key, "expected an integer");
    return v.get<int>();
}

inline int opt_int(const json& j, const char* key, const std::string& where, int def) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_number_integer()) fail(where + "/" + key, "expected an integer");
    return j.at(key).get<int>();
}

inline bool opt_bool(const json& j, const char* key, const std::string& where, bool def) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_boolean()) fail(where + "/" + key, "expected a boolean");
    return j.at(key).get<bool>();
}

inline std::string need_str(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_string()) fail(where + "/" + key, "expected a string");
    return v.get<std::string>();
}

inline std::vector<double> num_array(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) fail(where, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json to_json(const PotentialFn& phi);
PotentialFn potential_from_json(const json& j, const std::string& where);

json to_json(const ShapingTerm& term);
ShapingTerm term_from_json(const json& j, const std::string& where, double default_pbrs_gamma);

json to_json(const RewardSpec& spec);
RewardSpec reward_spec_from_json(const json& j, const std::string& where,
                                 double default_pbrs_gamma);

json to_json(const GridSpec& spec, InterpMode interp);

}  // namespace shapelab::detail
