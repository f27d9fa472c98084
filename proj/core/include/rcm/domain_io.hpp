#pragma once

#include <iosfwd>
#include <string>

#include "rcm/lattice.hpp"

namespace rcm {

// Text format: "V <n> E <m>", then n lines "x y", then m lines "i j" (vertex indices).
void write_domain(std::ostream& out, const Domain& d);
Domain read_domain(std::istream& in);

std::string domain_to_string(const Domain& d);
Domain domain_from_string(const std::string& text);

// "box:N", "annulus:r:R", "rect:x0:y0:x1:y1" or "file:path".
Domain parse_domain_spec(const std::string& spec);

}  // namespace rcm
