#ifndef CMIN_CLI_HPP
#define CMIN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cmin::cli {

// Exit codes: 0 success, 1 usage or parse error, 2 internal-invariant
// failure, 3 check mismatch.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

} // namespace cmin::cli

#endif
