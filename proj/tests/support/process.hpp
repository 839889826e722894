#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef RATIONALIZER_CLI_PATH
#error "RATIONALIZER_CLI_PATH must point at the built command-line tool"
#endif

namespace fixture {

struct run_result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

/// Runs the CLI with `args`, capturing stdout and stderr. `env` entries are
/// "NAME=value" prefixes for the command.
inline run_result run_cli(const std::vector<std::string>& args, const std::vector<std::string>& env = {}) {
  const auto err_path = std::filesystem::temp_directory_path() /
                        ("rationalizer-stderr-" + std::to_string(::getpid()) + "-" +
                         std::to_string(reinterpret_cast<std::uintptr_t>(&args)));
  std::string cmd = "env -u RATIONALIZER_DATA_DIR -u RATIONALIZER_TOKEN";
  for (const auto& e : env) cmd += " " + shell_quote(e);
  cmd += " " + shell_quote(RATIONALIZER_CLI_PATH);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>" + shell_quote(err_path.string());

  run_result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  std::filesystem::remove(err_path);
  return r;
}

}  // namespace fixture
