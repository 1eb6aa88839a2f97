#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlf {

/// Dispatches a command line (without the program name). Exit code 0 on
/// success / valid / all-pass, 1 on countermodel or verification failure,
/// 2 on usage errors.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlf
