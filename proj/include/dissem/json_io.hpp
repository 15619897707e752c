// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dissem/core.hpp"
#include "dissem/errors.hpp"
#include "dissem/rational.hpp"

namespace dissem {

using nlohmann::json;

namespace jsondetail {

// SAX handler that keeps every non-integer number as its raw decimal text so
// values like 0.1 stay exact instead of passing through a double.
class ExactSax {
 public:
  using number_integer_t = json::number_integer_t;
  using number_unsigned_t = json::number_unsigned_t;
  using number_float_t = json::number_float_t;
  using string_t = json::string_t;
  using binary_t = json::binary_t;

  json root;

  bool null() { return emplace(json(nullptr)); }
  bool boolean(bool v) { return emplace(json(v)); }
  bool number_integer(number_integer_t v) { return emplace(json(v)); }
  bool number_unsigned(number_unsigned_t v) { return emplace(json(v)); }
  bool number_float(number_float_t, const string_t& raw) {
    return emplace(json(raw));
  }
  bool string(string_t& v) { return emplace(json(v)); }
  bool binary(binary_t&) { return false; }
  bool start_object(std::size_t) {
    return push(json::object());
  }
  bool key(string_t& k) {
    key_ = k;
    return true;
  }
  bool end_object() { return pop(); }
  bool start_array(std::size_t) { return push(json::array()); }
  bool end_array() { return pop(); }
  bool parse_error(std::size_t pos, const std::string&,
                   const nlohmann::detail::exception& ex) {
    throw DomainError("json parse error at byte " + std::to_string(pos) +
                      ": " + ex.what());
  }

 private:
  std::vector<json*> stack_;
  std::string key_;

  json* attach(json&& v) {
    if (stack_.empty()) {
      root = std::move(v);
      return &root;
    }
    json& top = *stack_.back();
    if (top.is_array()) {
      top.push_back(std::move(v));
      return &top.back();
    }
    top[key_] = std::move(v);
    return &top[key_];
  }
  bool emplace(json&& v) {
    attach(std::move(v));
    return true;
  }
  bool push(json&& v) {
    stack_.push_back(attach(std::move(v)));
    return true;
  }
  bool pop() {
    stack_.pop_back();
    return true;
  }
};

}  // namespace jsondetail

/// Parses JSON keeping fractional literals exact (as strings).
inline json parse_json_exact(const std::string& text) {
  jsondetail::ExactSax sax;
  if (!json::sax_parse(text, &sax))
    throw DomainError("json parse failed");
  return std::move(sax.root);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_exact(ss.str());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned())
    return Rational(BigInt(std::to_string(j.get<unsigned long long>())));
  throw DomainError("expected rational (string or integer), got " + j.dump());
}

inline long long_from_json(const json& j, const char* what) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw DomainError(std::string(what) + " must be an integer");
  return j.get<long>();
}

inline Instance instance_from_json(const json& j) {
  Instance inst;
  if (!j.is_object()) throw DomainError("instance must be a JSON object");
  if (!j.contains("n_peers") || !j.contains("n_parts") ||
      !j.contains("server_capacity") || !j.contains("peer_capacities"))
    throw DomainError(
        "instance needs n_peers, n_parts, server_capacity, peer_capacities");
  inst.n_peers = long_from_json(j.at("n_peers"), "n_peers");
  inst.n_parts = long_from_json(j.at("n_parts"), "n_parts");
  inst.server_capacity = rational_from_json(j.at("server_capacity"));
  for (const auto& c : j.at("peer_capacities"))
    inst.peer_capacities.push_back(rational_from_json(c));
  validate_instance(inst);
  return inst;
}

inline json instance_to_json(const Instance& inst) {
  json j;
  j["n_peers"] = inst.n_peers;
  j["n_parts"] = inst.n_parts;
  j["server_capacity"] = format_rational(inst.server_capacity);
  json caps = json::array();
  for (const auto& c : inst.peer_capacities) caps.push_back(format_rational(c));
  j["peer_capacities"] = std::move(caps);
  return j;
}

inline json schedule_to_json(const ContinuousSchedule& sched) {
  json uploads = json::array();
  for (const auto& u : sched.uploads) {
    json ju;
    ju["uploader"] = u.uploader;
    ju["downloader"] = u.downloader;
    ju["part"] = u.part;
    ju["start"] = format_rational(u.start);
    ju["end"] = format_rational(u.end);
    uploads.push_back(std::move(ju));
  }
  json j;
  j["uploads"] = std::move(uploads);
  return j;
}

inline ContinuousSchedule schedule_from_json(const json& j) {
  if (!j.is_object() || !j.contains("uploads"))
    throw DomainError("schedule needs an uploads array");
  ContinuousSchedule s;
  for (const auto& ju : j.at("uploads")) {
    Upload u;
    u.uploader = static_cast<NodeId>(long_from_json(ju.at("uploader"),
                                                    "uploader"));
    u.downloader = static_cast<NodeId>(long_from_json(ju.at("downloader"),
                                                      "downloader"));
    u.part = long_from_json(ju.at("part"), "part");
    u.start = rational_from_json(ju.at("start"));
    u.end = rational_from_json(ju.at("end"));
    s.uploads.push_back(std::move(u));
  }
  return s;
}

}  // namespace dissem
