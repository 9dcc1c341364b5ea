#include "bsdelab/experiments.hpp"

int main(int argc, char** argv) { return bsdelab::cli_main(argc, argv); }
