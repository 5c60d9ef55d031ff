// Copyright 2026 The GrEff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes the eight module mixes of the threads program. Each mix takes
// Operations, Scheduler and Main from the precise (P) or imprecise (I)
// version.

#include <fmt/format.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Module name -> source text from its header line up to the next one.
std::map<std::string, std::string> split_modules(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, current;
  while (std::getline(in, line)) {
    if (line.rfind("module ", 0) == 0) {
      std::istringstream words(line.substr(7));
      words >> current;
    }
    if (!current.empty()) out[current] += line + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: mkcombos PRECISE IMPRECISE OUTDIR\n";
    return 64;
  }
  try {
    const std::array<std::map<std::string, std::string>, 2> versions = {
        split_modules(slurp(argv[1])), split_modules(slurp(argv[2]))};
    const std::array<const char*, 3> order = {"Operations", "Scheduler", "Main"};
    std::filesystem::create_directories(argv[3]);
    for (int mask = 0; mask < 8; ++mask) {
      std::string tag, body;
      for (int i = 0; i < 3; ++i) {
        const int pick = (mask >> (2 - i)) & 1;
        tag += pick ? 'I' : 'P';
        auto it = versions[pick].find(order[i]);
        if (it == versions[pick].end())
          throw std::runtime_error(fmt::format("module {} missing", order[i]));
        body += it->second;
        if (body.back() != '\n') body += '\n';
      }
      std::string text =
          fmt::format("-- Operations {}, Scheduler {}, Main {}.\n", tag[0],
                      tag[1], tag[2]) + body;
      std::ofstream out(std::filesystem::path(argv[3]) /
                        fmt::format("combo_{}.greff", tag));
      out << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "mkcombos: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
