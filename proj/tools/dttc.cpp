#include <iostream>

int main() {
  std::cout << "dttc: placeholder\n";
  return 0;
}
