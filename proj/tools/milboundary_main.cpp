#include "milboundary/cli.hpp"

int main(int argc, char** argv) { return milb::run_cli(argc, argv); }
