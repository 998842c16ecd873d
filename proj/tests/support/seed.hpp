#pragma once

#include <cstdint>

namespace asymnet::testing {

/// Seed for randomized tests; --seed on the command line, 42 by default.
std::uint64_t seed();
void set_seed(std::uint64_t value);

/// Removes --seed N / --seed=N from argv, storing the value. Returns the new argc.
int consume_seed_flag(int argc, char** argv);

}  // namespace asymnet::testing
