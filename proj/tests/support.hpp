#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "polychor/syntax.hpp"
#include "polychor/typecheck.hpp"

namespace testkit {

inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names = {"bookseller", "bookseller_service", "two_buyer",
                                                 "delegation", "case_merge",         "poly_send"};
  return names;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(POLYCHOR_CORPUS_DIR) + "/" + name + ".chor";
}

inline std::string golden_path(const std::string& name) {
  return std::string(POLYCHOR_GOLDEN_DIR) + "/" + name;
}

inline polychor::SourceUnit load(const std::string& name) {
  return polychor::parse_program(read_file(corpus_path(name)));
}

inline polychor::CheckedUnit load_checked(const std::string& name) { return polychor::check_unit(load(name)); }

inline std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ' || s.back() == '\r')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == '\n' || s[i] == ' ')) ++i;
  return s.substr(i);
}

}  // namespace testkit
