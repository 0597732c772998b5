#ifndef NORMLEX_CLI_H_
#define NORMLEX_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace normlex {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line. `args` excludes the program name. Commands:
// build-index, normalize, train-mt, translate, evaluate, serve.
int run_cli(const std::vector<std::string> &args, std::istream &in, std::ostream &out,
            std::ostream &err);

}  // namespace normlex

#endif  // NORMLEX_CLI_H_
