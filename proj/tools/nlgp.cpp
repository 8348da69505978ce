#include "nlgp/cli.hpp"

int main(int argc, char** argv) { return nlgp::cli::run(argc, argv); }
