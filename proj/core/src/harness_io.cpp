#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

namespace vacflow {

namespace {

std::string number(double x) { return fmt::format("{:.17g}", x); }

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw ValidationError("dump: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

std::vector<std::string> energy_csv_header(const EnergyReport& r) {
  std::vector<std::string> h{"t", "physical_energy"};
  for (const auto& [name, value] : r.E_components) h.push_back("E_" + name);
  h.emplace_back("E_total");
  for (const auto& [name, value] : r.E_gamma_components) h.push_back("Egamma_" + name);
  for (const char* s : {"E_gamma_total", "curl_residual", "piola_residual_max", "J_min", "J_max"}) h.emplace_back(s);
  return h;
}

void write_energy_csv(std::ostream& out, std::span<const EnergyReport> reports) {
  if (reports.empty()) return;
  const std::vector<std::string> header = energy_csv_header(reports.front());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const EnergyReport& r : reports) {
    std::vector<double> row{r.t, r.physical_energy};
    for (const auto& [name, value] : r.E_components) row.push_back(value);
    row.push_back(r.E_total);
    for (const auto& [name, value] : r.E_gamma_components) row.push_back(value);
    for (double x : {r.E_gamma_total, r.curl_residual, r.piola_residual_max, r.J_min, r.J_max}) row.push_back(x);
    if (row.size() != header.size()) throw std::logic_error("write_energy_csv: inconsistent report layout");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << number(row[i]);
    out << '\n';
  }
}

void write_study_csv(std::ostream& out, const StudyResult& study) {
  out << study.parameter_name;
  for (const std::string& m : study.metric_names) out << ',' << m;
  out << ",status\n";
  for (const StudyRow& row : study.rows) {
    out << number(row.parameter);
    for (double m : row.metrics) out << ',' << number(m);
    std::string status = row.status;
    for (char& ch : status) {
      if (ch == '"') ch = '\'';
    }
    out << ",\"" << status << "\"\n";
  }
}

void write_dump(const std::string& path, const FlowState& state, const DensityProfile& profile, double kappa) {
  const DiscreteDomain& dom = state.eta.domain();
  const GeometrySnapshot snap = snapshot(state);
  std::vector<std::string> names;
  std::vector<const ScalarField*> fields;
  for (int c = 0; c < dom.dim(); ++c) {
    names.push_back(fmt::format("eta_{}", c));
    fields.push_back(&state.eta[c]);
  }
  for (int c = 0; c < dom.dim(); ++c) {
    names.push_back(fmt::format("v_{}", c));
    fields.push_back(&state.v[c]);
  }
  names.emplace_back("rho0");
  fields.push_back(&profile.rho0);
  names.emplace_back("J");
  fields.push_back(&snap.J);

  nlohmann::json meta;
  meta["format"] = "vacflow-dump";
  meta["version"] = 1;
  meta["dim"] = dom.dim();
  meta["n_horizontal"] = dom.n_horizontal();
  meta["n_vertical"] = dom.n_vertical();
  meta["nodes"] = dom.size();
  meta["time"] = state.time;
  meta["gamma"] = profile.gamma;
  meta["kappa"] = kappa;
  meta["fields"] = names;
  meta["order"] = "row-major, vertical index fastest";
  const std::string text = meta.dump(1);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write dump '" + path + "'");
  out.write(kDumpMagic, 8);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const ScalarField* f : fields) {
    for (double x : f->values()) put_u64(out, std::bit_cast<std::uint64_t>(x));
  }
  if (!out) throw ValidationError("error while writing dump '" + path + "'");
}

DumpData read_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open dump '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kDumpMagic, 8) != 0) throw ValidationError("dump: bad magic in '" + path + "'");
  const std::uint64_t length = get_u64(in);
  if (length > (std::uint64_t{1} << 30)) throw ValidationError("dump: implausible metadata length");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw ValidationError("dump: truncated metadata");

  DumpData d;
  d.metadata_json = text;
  const nlohmann::json meta = nlohmann::json::parse(text);
  d.dim = meta.at("dim").get<int>();
  d.n_horizontal = meta.at("n_horizontal").get<int>();
  d.n_vertical = meta.at("n_vertical").get<int>();
  d.time = meta.at("time").get<double>();
  d.field_names = meta.at("fields").get<std::vector<std::string>>();
  const auto nodes = meta.at("nodes").get<std::size_t>();
  for (std::size_t f = 0; f < d.field_names.size(); ++f) {
    std::vector<double> values(nodes);
    for (double& x : values) x = std::bit_cast<double>(get_u64(in));
    d.fields.push_back(std::move(values));
  }
  return d;
}

RunOutcome run_simulation(const RunConfig& config, bool write_outputs) {
  validate(config);
  auto [profile, u0] = make_initial_data(config);
  SolverConfig cfg = config.solver;
  cfg.gamma = config.eos.gamma;

  RunOutcome out;
  try {
    out.trajectory = run(u0, profile, cfg);
  } catch (const SolverAbort& e) {
    if (e.partial()) out.trajectory = *e.partial();
    out.aborted = true;
    out.abort_time = e.time();
    out.message = e.what();
  }
  out.profile = std::move(profile);

  if (!write_outputs) return out;
  namespace fs = std::filesystem;
  const fs::path dir(config.output.directory);
  fs::create_directories(dir);
  {
    const fs::path p = dir / "config.ini";
    std::ofstream f(p);
    f << to_ini(config);
    out.written.push_back(p.string());
  }
  if (!config.output.energy_csv.empty() && !out.trajectory.reports.empty()) {
    const fs::path p = dir / config.output.energy_csv;
    std::ofstream f(p);
    if (!f) throw ValidationError("cannot write '" + p.string() + "'");
    write_energy_csv(f, out.trajectory.reports);
    out.written.push_back(p.string());
  }
  if (config.output.dump_stride > 0) {
    const auto& samples = out.trajectory.samples;
    const auto stride = static_cast<std::size_t>(config.output.dump_stride);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (k % stride != 0 && k + 1 != samples.size()) continue;
      const fs::path p = dir / fmt::format("{}_{:06d}.vfd", config.output.dump_prefix, k);
      write_dump(p.string(), samples[k], out.profile, cfg.kappa);
      out.written.push_back(p.string());
    }
  }
  return out;
}

}  // namespace vacflow
