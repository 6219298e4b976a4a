#include "evograph/json_io.hpp"

#include <fstream>
#include <sstream>

namespace evograph::jsonio {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

json parse(const std::string& text, const std::string& ctx) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(ctx + ": invalid JSON");
  return j;
}

std::vector<std::pair<int, std::string>> read_jsonl(const std::string& path) {
  std::string content = read_file(path);
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(content);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(number, line);
  }
  return out;
}

void expect_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ParseError(ctx + ": unknown field '" + it.key() + "'");
  }
}

std::string require_string(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(ctx + ": missing required field '" + key + "'");
  if (!it->is_string())
    throw ParseError(ctx + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::string get_string(const json& j, const char* key, const std::string& ctx,
                       const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string())
    throw ParseError(ctx + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<int> get_int(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer())
    throw ParseError(ctx + ": field '" + key + "' must be an integer");
  return it->get<int>();
}

double require_double(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(ctx + ": missing required field '" + key + "'");
  if (!it->is_number())
    throw ParseError(ctx + ": field '" + key + "' must be a number");
  return it->get<double>();
}

std::optional<double> get_double(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number())
    throw ParseError(ctx + ": field '" + key + "' must be a number");
  return it->get<double>();
}

}  // namespace evograph::jsonio
