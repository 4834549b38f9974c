#include "ruelle/cli.hpp"

int main(int argc, char** argv) { return ruelle::cli::run(argc, argv); }
