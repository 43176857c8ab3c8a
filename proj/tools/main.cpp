#include "epsched/scenario.hpp"

int main(int argc, char** argv) {
    return epsched::cli_main(argc, argv);
}
