#pragma once

namespace evitsim {

// Exit codes: 0 ok, 1 module or verification failure, 2 usage error.
int run_cli(int argc, char** argv);

}  // namespace evitsim
