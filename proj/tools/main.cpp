#include "cli.hpp"

int main(int argc, char** argv) { return tbgcli::run(std::vector<std::string>(argv, argv + argc)); }
