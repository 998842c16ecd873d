#include "support/seed.hpp"

#include <cstdlib>
#include <string>

namespace asymnet::testing {

namespace {
std::uint64_t g_seed = 42;
}

std::uint64_t seed() { return g_seed; }
void set_seed(std::uint64_t value) { g_seed = value; }

int consume_seed_flag(int argc, char** argv) {
    int out = 0;
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) {
            g_seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (arg.rfind("--seed=", 0) == 0) {
            g_seed = std::strtoull(arg.c_str() + 7, nullptr, 10);
        } else {
            argv[out++] = argv[i];
        }
    }
    return out;
}

}  // namespace asymnet::testing
