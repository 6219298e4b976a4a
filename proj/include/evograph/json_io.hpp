#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evograph/types.hpp"

namespace evograph::jsonio {

using nlohmann::json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Parse with ParseError carrying ctx (typically "file" or "file:line").
json parse(const std::string& text, const std::string& ctx);

// Non-empty lines of a .jsonl file with their 1-based line numbers.
std::vector<std::pair<int, std::string>> read_jsonl(const std::string& path);

// Field accessors; every failure is a ParseError naming ctx and the key.
void expect_object(const json& j, const std::string& ctx);
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx);
std::string require_string(const json& j, const char* key, const std::string& ctx);
std::string get_string(const json& j, const char* key, const std::string& ctx,
                       const std::string& fallback = "");
std::optional<int> get_int(const json& j, const char* key, const std::string& ctx);
double require_double(const json& j, const char* key, const std::string& ctx);
std::optional<double> get_double(const json& j, const char* key, const std::string& ctx);

}  // namespace evograph::jsonio
