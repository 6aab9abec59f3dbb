#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hk/error.hpp"
#include "hk/experiment.hpp"

namespace hk {

namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

Table read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("missing artifact " + p.string());
  Table rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw IoError("empty artifact " + p.string());
  return rows;
}

std::size_t column(const Table& t, const std::string& name) {
  const auto& h = t.front();
  const auto it = std::find(h.begin(), h.end(), name);
  if (it == h.end()) throw IoError("artifact lacks column " + name);
  return static_cast<std::size_t>(it - h.begin());
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Long (series, x, error) rows -> one column per series, rows sorted by x.
struct Pivot {
  std::vector<std::string> series;
  std::map<double, std::map<std::string, std::string>> cells;
};

Pivot pivot(const Table& errors, const std::string& skip_suffix = {}) {
  const std::size_t cs = column(errors, "series");
  const std::size_t cx = column(errors, "x");
  const std::size_t ce = column(errors, "error");
  Pivot p;
  for (std::size_t r = 1; r < errors.size(); ++r) {
    const auto& row = errors[r];
    const std::string& s = row.at(cs);
    if (!skip_suffix.empty() && s.size() >= skip_suffix.size() &&
        s.compare(s.size() - skip_suffix.size(), skip_suffix.size(), skip_suffix) == 0) {
      continue;
    }
    if (std::find(p.series.begin(), p.series.end(), s) == p.series.end()) p.series.push_back(s);
    p.cells[std::stod(row.at(cx))][s] = row.at(ce);
  }
  return p;
}

void write_pivot(const fs::path& path, const std::string& xname, const Pivot& p,
                 const std::vector<std::pair<std::string, std::function<std::string(double)>>>& extra = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << xname;
  for (const auto& s : p.series) out << ",err_" << s;
  for (const auto& e : extra) out << ',' << e.first;
  out << '\n';
  for (const auto& [x, row] : p.cells) {
    out << num(x);
    for (const auto& s : p.series) {
      const auto it = row.find(s);
      out << ',' << (it == row.end() ? "" : it->second);
    }
    for (const auto& e : extra) out << ',' << e.second(x);
    out << '\n';
  }
}

}  // namespace

std::vector<std::string> emit_plotdata(const std::string& run_dir) {
  const fs::path root(run_dir);
  std::ifstream meta_in(root / "run.json");
  if (!meta_in) throw IoError("no run.json in " + run_dir);
  const auto meta = nlohmann::json::parse(meta_in);
  const std::string kind = meta.at("config").at("experiment").at("kind").get<std::string>();
  const int d = meta.at("config").at("physics").at("dimension").get<int>();
  const fs::path out_dir = root / "plotdata";
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  if (kind == "henon_heiles_expectation" || kind == "torsional_expectation") {
    const Table e = read_csv(root / "energies.csv");
    const Table r = read_csv(root / "reference.csv");
    if (e.size() != r.size()) throw IoError("energies and reference have different lengths");
    const fs::path path = out_dir / "energies.csv";
    std::ofstream out(path);
    out << "t,E_kin,E_pot,E_tot,ref_kin,ref_pot,ref_tot\n";
    const fs::path dev_path = out_dir / "deviation.csv";
    std::ofstream dev(dev_path);
    dev << "t,dev_kin,dev_pot,dev_tot\n";
    for (std::size_t i = 1; i < e.size(); ++i) {
      const auto& a = e[i];
      const auto& b = r[i];
      out << a[0] << ',' << a[1] << ',' << a[2] << ',' << a[3] << ',' << b[1] << ',' << b[2] << ',' << b[3] << '\n';
      dev << a[0];
      for (int k = 1; k <= 3; ++k) dev << ',' << num(std::abs(std::stod(a[k]) - std::stod(b[k])));
      dev << '\n';
    }
    written.push_back(path.string());
    written.push_back(dev_path.string());
    return written;
  }

  const Table errors = read_csv(root / "errors.csv");
  if (kind == "initial_sampling") {
    const double variance = 1.0 - std::pow(4.0, -d);
    const fs::path path = out_dir / "initial_sampling.csv";
    write_pivot(path, "M", pivot(errors),
                {{"clt_line", [variance](double m) { return num(std::sqrt(variance / m)); }}});
    written.push_back(path.string());
  } else if (kind == "timestep_study") {
    // The t=0 sampling error is a horizontal reference line.
    std::map<std::string, std::string> initial;
    const std::size_t cs = column(errors, "series");
    const std::size_t ce = column(errors, "error");
    for (std::size_t r = 1; r < errors.size(); ++r) {
      const std::string& s = errors[r][cs];
      if (s.size() > 8 && s.compare(s.size() - 8, 8, "_initial") == 0) initial[s] = errors[r][ce];
    }
    std::vector<std::pair<std::string, std::function<std::string(double)>>> extra;
    for (const auto& [s, v] : initial) extra.push_back({s, [v = v](double) { return v; }});
    const fs::path path = out_dir / "timestep.csv";
    write_pivot(path, "tau", pivot(errors, "_initial"), extra);
    written.push_back(path.string());
  } else {
    const fs::path path = out_dir / (kind + ".csv");
    write_pivot(path, "t", pivot(errors));
    written.push_back(path.string());
  }
  return written;
}

}  // namespace hk
