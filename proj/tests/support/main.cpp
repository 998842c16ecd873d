#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "support/seed.hpp"

int main(int argc, char** argv) {
    argc = asymnet::testing::consume_seed_flag(argc, argv);
    doctest::Context context(argc, argv);
    return context.run();
}
