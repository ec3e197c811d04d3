#pragma once

namespace ltlab::cli {

int run(int argc, char** argv);

inline int run(int, char**) { return 0; }

}  // namespace ltlab::cli
