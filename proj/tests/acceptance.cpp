// Acceptance suite: one line per criterion. With arguments, runs only the
// listed criteria (e.g. "AC-3 AC-7").
#include <cstdio>
#include <string>
#include <vector>

#include "pushasep/validation.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> ids(argv + 1, argv + argc);
  bool ok = true;
  for (const auto& id : ids.empty() ? pushasep::criterion_ids() : ids) {
    const auto r = pushasep::run_criterion(id);
    std::printf("%s\n", pushasep::format_result(r).c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
