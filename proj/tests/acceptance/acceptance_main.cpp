// Prints one PASS/FAIL line per acceptance criterion. With --criterion N only
// that criterion runs. Exit status is nonzero when any selected criterion fails.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "lorawban/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace lorawban;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (ids.empty())
    for (int i = 1; i <= acceptance::kCriteria; ++i) ids.push_back(i);

  const acceptance::Options opt;
  bool all = true;
  for (int id : ids) {
    const auto r = acceptance::run(id, opt);
    std::cout << (r.pass ? "PASS" : "FAIL") << " C" << r.id << " " << r.name << " | measured: " << r.measured
              << " | bound: " << r.bound << " | " << experiment::format_number(r.runtime_s) << " s\n";
    if (!r.detail.empty()) std::cout << "    " << r.detail << "\n";
    std::cout.flush();
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
