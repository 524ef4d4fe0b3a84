#include "riskev/cli.hpp"

int main(int argc, char** argv) { return riskev::run_command(argc, argv); }
