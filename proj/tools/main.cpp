#include "adiaqnn/commands.hpp"

int main(int argc, char** argv) { return adiaqnn::run_cli(argc, argv); }
