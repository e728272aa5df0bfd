#include "scbench/cli.hpp"

int main(int argc, char** argv) {
    return scbench::cli_main(argc, argv);
}
