// Regenerates the shipped corpus directory from the builders.

#include <iostream>

#include "twistcart/corpus.hpp"

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : twistcart::corpus::default_dir();
  try {
    twistcart::corpus::write_corpus(dir);
    std::cout << "wrote " << twistcart::corpus::validate_corpus(dir) << " entries to " << dir << "\n";
  } catch (const twistcart::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
