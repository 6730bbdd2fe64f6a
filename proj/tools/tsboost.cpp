#include "tsboost/commands.hpp"

int main(int argc, char** argv) { return tsboost::cli::run(argc, argv); }
