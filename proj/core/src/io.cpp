#include "toda/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "toda/error.hpp"

namespace toda::io {

using forward::cplx;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw Error(Stage::io, "cannot create directory " + p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(p);
  if (!os) throw Error(Stage::io, "cannot open " + p.string() + " for writing");
  return os;
}

void close_out(std::ofstream& os, const fs::path& p) {
  os.close();
  if (!os) throw Error(Stage::io, "write to " + p.string() + " failed");
}

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Table read_table(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw Error(Stage::io, "cannot open " + p.string());
  Table t;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string kv;
      while (ls >> kv) {
        auto eq = kv.find('=');
        if (eq != std::string::npos) t.meta[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split(line, ',');
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != t.columns.size())
      throw Error(Stage::io, p.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw Error(Stage::io, p.string() + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double meta_num(const Table& t, const std::string& key, const fs::path& p) {
  auto it = t.meta.find(key);
  if (it == t.meta.end()) throw Error(Stage::io, p.string() + ": missing header field " + key);
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw Error(Stage::io, p.string() + ": bad header field " + key);
  }
}

void expect_columns(const Table& t, const std::vector<std::string>& cols, const fs::path& p) {
  if (t.columns != cols) throw Error(Stage::io, p.string() + ": unexpected columns");
}

}  // namespace

void write_state_csv(const fs::path& path, const lattice::LatticeState& s) {
  auto os = open_out(path);
  const auto& bm = s.boundary;
  os << "# t=" << fmt(s.t) << " n_min=" << s.n_min << " n_max=" << s.n_max << " boundary=" << fmt(bm.left_a)
     << ',' << fmt(bm.left_b) << ',' << fmt(bm.right_a) << ',' << fmt(bm.right_b) << "\n";
  os << "n,a,b\n";
  for (int n = s.n_min; n <= s.n_max; ++n) os << n << ',' << fmt(s.a_at(n)) << ',' << fmt(s.b_at(n)) << "\n";
  close_out(os, path);
}

lattice::LatticeState read_state_csv(const fs::path& path) {
  auto t = read_table(path);
  expect_columns(t, {"n", "a", "b"}, path);
  int n_min = static_cast<int>(meta_num(t, "n_min", path));
  int n_max = static_cast<int>(meta_num(t, "n_max", path));
  lattice::BoundaryModel bm;
  if (auto it = t.meta.find("boundary"); it != t.meta.end()) {
    auto v = split(it->second, ',');
    if (v.size() != 4) throw Error(Stage::io, path.string() + ": boundary needs four values");
    bm = {std::stod(v[0]), std::stod(v[1]), std::stod(v[2]), std::stod(v[3])};
  }
  if (n_max < n_min || t.rows.size() != static_cast<size_t>(n_max - n_min + 1))
    throw Error(Stage::io, path.string() + ": row count does not match the window");
  lattice::LatticeState s(n_min, n_max, meta_num(t, "t", path), bm);
  for (size_t i = 0; i < t.rows.size(); ++i) {
    int n = static_cast<int>(t.rows[i][0]);
    if (n != n_min + static_cast<int>(i)) throw Error(Stage::io, path.string() + ": indices are not consecutive");
    s.a_ref(n) = t.rows[i][1];
    s.b_ref(n) = t.rows[i][2];
  }
  return s;
}

void write_scattering(const fs::path& dir, const forward::ScatteringData& d) {
  {
    auto p = dir / "reflection.csv";
    auto os = open_out(p);
    os << "# t=" << fmt(d.t) << " M=" << d.grid.size() << "\n";
    os << "theta,lambda,re_R,im_R\n";
    for (size_t i = 0; i < d.grid.size(); ++i)
      os << fmt(d.grid.theta[i]) << ',' << fmt(d.grid.lambda(i)) << ',' << fmt(d.R[i].real()) << ','
         << fmt(d.R[i].imag()) << "\n";
    close_out(os, p);
  }
  {
    auto p = dir / "bound_states.csv";
    auto os = open_out(p);
    os << "# t=" << fmt(d.t) << "\n";
    os << "mu,z,M_inv_sq\n";
    for (const auto& b : d.bound_states) os << fmt(b.mu) << ',' << fmt(b.z) << ',' << fmt(b.M_inv_sq) << "\n";
    close_out(os, p);
  }
  auto cp = dir / "contour.csv";
  if (!d.contour.empty()) {
    auto os = open_out(cp);
    os << "# t=" << fmt(d.t) << " rho=" << fmt(d.contour.rho) << "\n";
    os << "theta,re_R,im_R\n";
    for (size_t i = 0; i < d.contour.theta.size(); ++i)
      os << fmt(d.contour.theta[i]) << ',' << fmt(d.contour.R[i].real()) << ',' << fmt(d.contour.R[i].imag())
         << "\n";
    close_out(os, cp);
  } else {
    std::error_code ec;
    fs::remove(cp, ec);
  }
}

forward::ScatteringData read_scattering(const fs::path& dir) {
  forward::ScatteringData d;
  auto rp = dir / "reflection.csv";
  auto r = read_table(rp);
  expect_columns(r, {"theta", "lambda", "re_R", "im_R"}, rp);
  d.t = meta_num(r, "t", rp);
  for (const auto& row : r.rows) {
    d.grid.theta.push_back(row[0]);
    d.R.emplace_back(row[2], row[3]);
  }
  auto bp = dir / "bound_states.csv";
  auto b = read_table(bp);
  expect_columns(b, {"mu", "z", "M_inv_sq"}, bp);
  for (const auto& row : b.rows) {
    forward::BoundState s;
    s.mu = row[0], s.z = row[1], s.M_inv_sq = row[2], s.jost_norm_sq = 1.0 / row[2];
    d.bound_states.push_back(s);
  }
  auto cp = dir / "contour.csv";
  if (fs::exists(cp)) {
    auto c = read_table(cp);
    expect_columns(c, {"theta", "re_R", "im_R"}, cp);
    d.contour.rho = meta_num(c, "rho", cp);
    for (const auto& row : c.rows) {
      d.contour.theta.push_back(row[0]);
      d.contour.R.emplace_back(row[1], row[2]);
    }
  }
  return d;
}

void write_measure_csv(const fs::path& path, const forward::SpectralMeasure& m) {
  auto os = open_out(path);
  os << "lambda,w\n";
  for (size_t i = 0; i < m.size(); ++i) os << fmt(m.lambda[i]) << ',' << fmt(m.w[i]) << "\n";
  close_out(os, path);
}

forward::SpectralMeasure read_measure_csv(const fs::path& path) {
  auto t = read_table(path);
  expect_columns(t, {"lambda", "w"}, path);
  forward::SpectralMeasure m;
  for (const auto& row : t.rows) m.lambda.push_back(row[0]), m.w.push_back(row[1]);
  return m;
}

void write_kernel_csv(const fs::path& path, const inverse::MarchenkoKernel& k) {
  auto os = open_out(path);
  os << "# max_imag=" << fmt(k.max_imag) << " contour=" << (k.contour ? 1 : 0) << "\n";
  os << "x,F\n";
  for (int x = k.x_min; x <= k.x_max; ++x) os << x << ',' << fmt(k.at(x)) << "\n";
  close_out(os, path);
}

}  // namespace toda::io
