#include "lqgcodec/cli.hpp"

int main(int argc, char** argv) { return lqgcodec::cli::run(argc, argv); }
