#include "netdos/cli.hpp"

int main(int argc, char** argv) {
    return netdos::cli_run(argc, argv);
}
