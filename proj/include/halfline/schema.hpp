#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "errors.hpp"

namespace halfline::schema {

using json = nlohmann::json;

// RFC 6901 escaping for one reference token.
inline std::string escape_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

inline bool type_matches(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "number") return v.is_number();
    if (t == "integer") {
        if (v.is_number_integer()) return true;
        if (!v.is_number_float()) return false;
        double d = v.get<double>();
        return std::isfinite(d) && d == std::floor(d);
    }
    throw config_error("", "schema uses unknown type '" + t + "'");
}

// Validates against the subset of JSON Schema used by the shipped schemas:
// type, enum, const, required, properties, additionalProperties (bool),
// items, minItems, maxItems, minimum, maximum, exclusiveMinimum,
// exclusiveMaximum, oneOf, and local $ref into #/definitions. Throws
// config_error carrying a JSON pointer.
inline void validate(const json& v, const json& s, const std::string& ptr, const json& root) {
    if (s.contains("$ref")) {
        auto ref = s["$ref"].get<std::string>();
        const std::string pre = "#/definitions/";
        if (ref.rfind(pre, 0) != 0 || !root.contains("definitions") || !root["definitions"].contains(ref.substr(pre.size())))
            throw config_error("", "schema has unresolved reference " + ref);
        validate(v, root["definitions"][ref.substr(pre.size())], ptr, root);
        return;
    }
    auto fail = [&](const std::string& msg) { throw config_error(ptr.empty() ? "/" : ptr, msg); };
    if (s.contains("oneOf")) {
        int hits = 0;
        std::string first;
        for (const auto& alt : s["oneOf"]) {
            try {
                validate(v, alt, ptr, root);
                ++hits;
            } catch (const config_error& e) {
                if (first.empty()) first = e.what();
            }
        }
        if (hits != 1) fail(hits == 0 ? "matches none of the allowed forms (" + first + ")"
                                      : "matches more than one allowed form");
    }
    if (s.contains("type")) {
        const auto& t = s["type"];
        bool ok = false;
        if (t.is_array()) {
            for (const auto& x : t) ok = ok || type_matches(v, x.get<std::string>());
        } else {
            ok = type_matches(v, t.get<std::string>());
        }
        if (!ok) fail("expected type " + t.dump());
    }
    if (s.contains("const") && v != s["const"]) fail("must equal " + s["const"].dump());
    if (s.contains("enum")) {
        bool ok = false;
        for (const auto& e : s["enum"]) ok = ok || v == e;
        if (!ok) fail("must be one of " + s["enum"].dump());
    }
    if (v.is_number()) {
        double d = v.get<double>();
        if (!std::isfinite(d)) fail("must be finite");
        if (s.contains("minimum") && d < s["minimum"].get<double>()) fail("must be >= " + s["minimum"].dump());
        if (s.contains("maximum") && d > s["maximum"].get<double>()) fail("must be <= " + s["maximum"].dump());
        if (s.contains("exclusiveMinimum") && d <= s["exclusiveMinimum"].get<double>())
            fail("must be > " + s["exclusiveMinimum"].dump());
        if (s.contains("exclusiveMaximum") && d >= s["exclusiveMaximum"].get<double>())
            fail("must be < " + s["exclusiveMaximum"].dump());
    }
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
            fail("needs at least " + s["minItems"].dump() + " items");
        if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
            fail("allows at most " + s["maxItems"].dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], ptr + "/" + std::to_string(i), root);
    }
    if (v.is_object()) {
        if (s.contains("required"))
            for (const auto& r : s["required"]) {
                auto key = r.get<std::string>();
                if (!v.contains(key)) throw config_error(ptr + "/" + escape_token(key), "required field is missing");
            }
        const json* props = s.contains("properties") ? &s["properties"] : nullptr;
        bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
        for (auto it = v.begin(); it != v.end(); ++it) {
            std::string child = ptr + "/" + escape_token(it.key());
            if (props && props->contains(it.key())) validate(it.value(), (*props)[it.key()], child, root);
            else if (closed) throw config_error(child, "unknown field");
        }
    }
}

inline void validate(const json& v, const json& s) { validate(v, s, "", s); }

}  // namespace halfline::schema
