#ifndef COEVENT_CLI_HPP
#define COEVENT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace coevent::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kBudgetError = 2;
constexpr int kDeadEnd = 3;

// Entry point shared by the executable and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace coevent::cli

#endif
