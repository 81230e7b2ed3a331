// Writes the built-in LDPC(128,64) parity-check matrix in sparse text form.

#include <iostream>

#include "tibwb/fec.hpp"

int main(int argc, char** argv) {
  const tibwb::CodeSpec spec = tibwb::CodeSpec::generate();
  if (argc > 1) {
    spec.save(argv[1]);
  } else {
    std::cout << spec.to_text();
  }
  return 0;
}
