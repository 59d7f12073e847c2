#include "oswald/cli.hpp"

int main(int argc, char** argv) { return oswald::run(argc, argv); }
