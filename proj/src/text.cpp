#include "evrp/text.hpp"

#include <charconv>

namespace evrp {

std::string format_double(double v) {
  char buf[32];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace evrp
