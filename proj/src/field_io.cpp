#include "cma/field_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cma {

namespace {

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Ball: return "ball";
    case Shape::Box: return "box";
    case Shape::Torus: return "torus";
  }
  return "?";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  const auto& dom = *field.domain;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "# cma-field 1\n";
  out << "# shape=" << shape_name(dom.shape()) << " m=" << dom.m()
      << " n=" << dom.nodes_per_axis() << " h=" << fmt(dom.spacing())
      << " pad=" << dom.pad() << "\n";
  if (dom.shape() == Shape::Ball) {
    out << "# radius=" << fmt(dom.radius()) << " center=";
    for (int a = 0; a < dom.dims(); ++a)
      out << (a ? "," : "") << fmt(dom.center()[a]);
    out << "\n";
  } else if (dom.shape() == Shape::Box) {
    out << "# extent=" << fmt(dom.extent()) << "\n";
  } else {
    out << "# period=" << fmt(dom.period()) << "\n";
  }
  out << "# columns: node,class";
  for (int g = 1; g <= dom.m(); ++g) out << ",x" << g << ",y" << g;
  out << ",value\n";
  const char cls_char[3] = {'i', 'b', 'e'};
  for (std::size_t nd = 0; nd < dom.lattice_size(); ++nd) {
    if (!field.defined_at(nd)) continue;
    out << nd << ',' << cls_char[static_cast<int>(dom.node_class(nd))];
    for (int a = 0; a < dom.dims(); ++a) out << ',' << fmt(dom.coord(nd, a));
    out << ',' << fmt(field[nd]) << '\n';
  }
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# cma-field 1", 0) != 0)
    throw Error(ErrorKind::ParseError, path.string() + ": not a cma-field file");

  std::string shape;
  int m = 0, n = 0, pad = 0;
  double h = 0, radius = 1, extent = 2, period = 1;
  std::array<double, 4> center{0, 0, 0, 0};

  auto parse_kv = [&](const std::string& text) {
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "shape") shape = val;
      else if (key == "m") m = std::stoi(val);
      else if (key == "n") n = std::stoi(val);
      else if (key == "pad") pad = std::stoi(val);
      else if (key == "h") h = std::stod(val);
      else if (key == "radius") radius = std::stod(val);
      else if (key == "extent") extent = std::stod(val);
      else if (key == "period") period = std::stod(val);
      else if (key == "center") {
        std::istringstream cs(val);
        std::string part;
        for (int a = 0; a < 4 && std::getline(cs, part, ','); ++a)
          center[a] = std::stod(part);
      }
    }
  };

  std::streampos data_start = in.tellg();
  while (std::getline(in, line) && line.rfind("#", 0) == 0) {
    parse_kv(line.substr(1));
    data_start = in.tellg();
  }
  in.clear();
  in.seekg(data_start);

  DomainPtr dom;
  if (shape == "ball")
    dom = std::make_shared<GridDomain>(GridDomain::ball(m, n, radius, center, pad));
  else if (shape == "box")
    dom = std::make_shared<GridDomain>(GridDomain::box(m, n, extent, pad));
  else if (shape == "torus")
    dom = std::make_shared<GridDomain>(GridDomain::torus(m, n, period));
  else
    throw Error(ErrorKind::ParseError, path.string() + ": unknown shape");
  (void)h;

  ScalarField f(dom);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    if (!std::getline(ls, cell, ',')) continue;
    std::size_t node = std::stoull(cell);
    std::getline(ls, cell, ',');  // class, informative only
    for (int a = 0; a < dom->dims(); ++a) std::getline(ls, cell, ',');
    std::getline(ls, cell, ',');
    if (node >= dom->lattice_size())
      throw Error(ErrorKind::ParseError, path.string() + ": node out of range");
    f[node] = std::stod(cell);
  }
  return f;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(bytes));
  return buf;
}

}  // namespace cma
