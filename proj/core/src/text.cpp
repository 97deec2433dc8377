#include "tampersim/text.hpp"

#include <cstdio>

namespace tampersim {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

}  // namespace tampersim
