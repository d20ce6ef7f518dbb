#pragma once

namespace lqgcodec::cli {

// Exit codes: 0 success, 1 config/schema error, 2 infeasible budget or
// unsupported scope, 3 encoder/decoder sync loss.
int run(int argc, const char* const* argv);

}  // namespace lqgcodec::cli
