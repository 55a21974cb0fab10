#include "koksma/cli.hpp"

int main(int argc, char** argv) {
  return koksma::run_cli({argv + 1, argv + argc});
}
