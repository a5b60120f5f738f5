#include "commands.hpp"

int main(int argc, char** argv) { return oobball::cli::run(argc, argv); }
