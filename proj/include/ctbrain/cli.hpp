#ifndef CTBRAIN_CLI_HPP
#define CTBRAIN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ctbrain {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2 };

/// Entry point for `ctbrain {segment|eval|phantom} ...`; args exclude argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctbrain

#endif
