#include "rcm/domain_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rcm {

void write_domain(std::ostream& out, const Domain& d) {
    out << "V " << d.num_vertices() << " E " << d.num_edges() << '\n';
    for (const auto& v : d.vertices()) out << v.x << ' ' << v.y << '\n';
    for (const auto& e : d.edges()) out << e.u << ' ' << e.v << '\n';
}

Domain read_domain(std::istream& in) {
    std::string vtag, etag;
    long long nv = -1, ne = -1;
    if (!(in >> vtag >> nv >> etag >> ne) || vtag != "V" || etag != "E" || nv < 1 || ne < 0)
        throw std::runtime_error("domain file: malformed header");
    std::vector<Vertex> vs(static_cast<std::size_t>(nv));
    for (auto& v : vs)
        if (!(in >> v.x >> v.y)) throw std::runtime_error("domain file: truncated vertex list");
    std::vector<std::pair<Vertex, Vertex>> es;
    es.reserve(static_cast<std::size_t>(ne));
    for (long long i = 0; i < ne; ++i) {
        long long a, b;
        if (!(in >> a >> b)) throw std::runtime_error("domain file: truncated edge list");
        if (a < 0 || b < 0 || a >= nv || b >= nv) throw std::runtime_error("domain file: edge index out of range");
        es.emplace_back(vs[a], vs[b]);
    }
    Domain d(vs, es);
    if (d.num_vertices() != nv || d.num_edges() != ne) throw std::runtime_error("domain file: duplicate entries");
    return d;
}

std::string domain_to_string(const Domain& d) {
    std::ostringstream out;
    write_domain(out, d);
    return out.str();
}

Domain domain_from_string(const std::string& text) {
    std::istringstream in(text);
    return read_domain(in);
}

Domain parse_domain_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "file") {
        std::ifstream in(rest);
        if (!in) throw std::invalid_argument("cannot open domain file " + rest);
        return read_domain(in);
    }
    std::vector<int> args;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            args.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad domain spec '" + spec + "'");
        }
    }
    if (kind == "box" && args.size() == 1) return build_box(args[0]);
    if (kind == "annulus" && args.size() == 2) return build_annulus(args[0], args[1]);
    if (kind == "rect" && args.size() == 4) return build_rectangle(args[0], args[1], args[2], args[3]);
    throw std::invalid_argument("bad domain spec '" + spec + "'");
}

}  // namespace rcm
