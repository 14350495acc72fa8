#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballcover/decision.hpp"
#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"

namespace ballcover {

// Round-trip formatting: 17 significant digits.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write_ball_list(std::ostringstream& os, const std::vector<Ball>& balls) {
    if (balls.empty()) {
        os << "[]";
        return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < balls.size(); ++i) {
        os << "    {\"center\": [";
        for (Eigen::Index k = 0; k < balls[i].center.size(); ++k)
            os << (k ? ", " : "") << format_real(balls[i].center[k]);
        os << "], \"radius\": " << format_real(balls[i].radius) << "}" << (i + 1 < balls.size() ? "," : "") << "\n";
    }
    os << "  ]";
}

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline double real_at(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ParseError(path + ": not finite");
    return x;
}

inline std::vector<Ball> parse_ball_list(const nlohmann::json& doc, const char* key, long long dim) {
    if (!doc.contains(key)) throw ParseError(std::string(key) + ": missing field");
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw ParseError(std::string(key) + ": expected an array");
    std::vector<Ball> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string here = std::string(key) + "[" + std::to_string(i) + "]";
        const auto& item = arr[i];
        if (!item.is_object()) throw ParseError(here + ": expected an object");
        if (!item.contains("center")) throw ParseError(here + ".center: missing field");
        if (!item.contains("radius")) throw ParseError(here + ".radius: missing field");
        const auto& c = item.at("center");
        if (!c.is_array()) throw ParseError(here + ".center: expected an array");
        if (static_cast<long long>(c.size()) != dim)
            throw ParseError(here + ".center: expected " + std::to_string(dim) + " coordinates, got " +
                             std::to_string(c.size()));
        Ball b;
        b.center.resize(dim);
        for (std::size_t k = 0; k < c.size(); ++k)
            b.center[static_cast<Eigen::Index>(k)] = real_at(c[k], here + ".center[" + std::to_string(k) + "]");
        b.radius = real_at(item.at("radius"), here + ".radius");
        if (!(b.radius > 0.0)) throw ParseError(here + ".radius: must be positive, got " + format_real(b.radius));
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace detail

// Canonical instance text: fields in the order dim, lambda, v.
inline std::string serialize_instance(const BallSystem& s) {
    std::ostringstream os;
    os << "{\n  \"dim\": " << s.dim << ",\n  \"lambda\": ";
    detail::write_ball_list(os, s.lambda);
    os << ",\n  \"v\": ";
    detail::write_ball_list(os, s.v);
    os << "\n}\n";
    return os.str();
}

inline BallSystem parse_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed JSON at " + detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                         e.what());
    }
    if (!doc.is_object()) throw ParseError("instance: expected a JSON object");
    if (!doc.contains("dim")) throw ParseError("dim: missing field");
    if (!doc.at("dim").is_number_integer()) throw ParseError("dim: expected an integer");
    const long long dim = doc.at("dim").get<long long>();
    if (dim < 2) throw ParseError("dim: must be at least 2, got " + std::to_string(dim));
    std::vector<Ball> lambda = detail::parse_ball_list(doc, "lambda", dim);
    std::vector<Ball> v = detail::parse_ball_list(doc, "v", dim);
    if (lambda.empty()) throw ParseError("lambda: at least one ball is required");
    try {
        return BallSystem::make(std::move(lambda), std::move(v));
    } catch (const InvalidInput& e) {
        throw ParseError(e.what());
    }
}

inline BallSystem read_instance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_instance(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_instance_file(const std::string& path, const BallSystem& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << serialize_instance(s);
    if (!out) throw Error(path + ": write failed");
}

namespace detail {

inline nlohmann::ordered_json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

inline nlohmann::ordered_json vector_json(const Vector& x) {
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < x.size(); ++k) arr.push_back(x[k]);
    return arr;
}

} // namespace detail

inline nlohmann::ordered_json report_json(const DecisionReport& r) {
    nlohmann::ordered_json j;
    j["covered"] = r.covered;
    j["witness"] = r.witness && r.witness_verified ? detail::vector_json(*r.witness) : nlohmann::ordered_json(nullptr);
    j["i_empty"] = r.i_empty;
    j["trivial_reason"] = r.trivial_reason ? nlohmann::ordered_json(*r.trivial_reason) : nlohmann::ordered_json(nullptr);
    auto certs = nlohmann::ordered_json::array();
    for (const auto& c : r.certificates) {
        nlohmann::ordered_json cj;
        cj["ref_index"] = c.input_index;
        cj["case"] = to_string(c.kind);
        cj["min_value"] = detail::finite_or_null(c.min_value);
        cj["max_value"] = detail::finite_or_null(c.max_value);
        cj["unbounded"] = std::isinf(c.max_value);
        certs.push_back(std::move(cj));
    }
    j["certificates"] = std::move(certs);
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [phase, ms] : r.timings_ms) t[phase] = ms;
    j["timings_ms"] = std::move(t);
    return j;
}

} // namespace ballcover
