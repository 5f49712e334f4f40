#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <typelab/constructions.hpp>
#include <typelab/density.hpp>
#include <typelab/energy.hpp>
#include <typelab/io.hpp>
#include <typelab/oracle.hpp>
#include <typelab/partitions.hpp>
#include <typelab/suite.hpp>
#include <typelab/typeproblem.hpp>
#include <typelab/uniformity.hpp>

using namespace typelab;
using io::json;

namespace {

constexpr const char* kVersion = "typelab 0.1.0";

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      parts.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad grid '" + s + "', expected lo:hi:step");
    }
  }
  require(parts.size() == 3 && parts[2] > 0 && parts[1] >= parts[0], ErrorCode::InvalidArgument,
          "bad grid '" + s + "', expected lo:hi:step");
  const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> g;
  for (std::size_t k = 0; k < n; ++k) g.push_back(parts[0] + parts[2] * static_cast<double>(k));
  return g;
}

std::map<std::string, double> parse_params(const std::string& s) {
  std::map<std::string, double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    require(eq != std::string::npos, ErrorCode::InvalidArgument, "parameter '" + tok + "' is not key=value");
    try {
      out[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "parameter '" + tok + "' has no numeric value");
    }
  }
  return out;
}

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

struct Output {
  std::string format = "json";
  std::string out_path;

  void emit(const json& j, const std::string& csv = {}) const {
    const std::string text = (format == "csv" && !csv.empty()) ? csv : io::canonical(j) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path);
      require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write " + out_path);
      f << text;
    }
  }
};

std::string partition_csv(const Partition& p) {
  std::string s = "left,right\n";
  for (const auto& I : p.intervals()) s += io::csv_num(I.left) + "," + io::csv_num(I.right) + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beurling-Malliavin density and exponential type toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Output out;
  unsigned threads = 0;
  app.add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  std::string input, intervals_path, partition_path, kind = "interior", grid_spec, name, params_spec, reference,
                                                      sequence_path, weights_path, samples_path, weight_name = "polynomial";
  double d = 1.0, scale = 1.0, a_min = 0.0, a_max = 4.0 * std::numbers::pi, freq_density = 8.0;
  double C1 = 5.0, C2 = 2.0, C3 = 1.5, delta = 1.0, Cbs = 1.0, l = 0.0, L = 1.0, c = 0.5, modulus = 1.0;
  std::optional<double> coverage, annihilator_a;
  std::vector<double> interval_bounds;
  std::size_t steps = 64;
  bool separated = false, extended = false, long_family = false, no_energy = false, monotone = false;
  std::vector<int> only;

  auto* energy = app.add_subcommand("energy", "Coulomb energy and deficit of a sequence on an interval");
  energy->add_option("--input", input, "sequence JSON")->required();
  energy->add_option("--interval", interval_bounds, "a,b")->delimiter(',')->expected(2);

  auto* partition = app.add_subcommand("partition", "greedy short partition");
  partition->add_option("--input", input, "sequence JSON")->required();
  partition->add_option("--d", d, "target density");
  partition->add_option("--scale", scale, "minimal-length scale");

  auto* classify = app.add_subcommand("classify", "short/long classification of an interval family");
  classify->add_option("--intervals", intervals_path, "intervals JSON")->required();
  classify->add_option("--coverage", coverage, "truncation extent");

  auto* density = app.add_subcommand("density", "interior or exterior density estimate");
  density->add_option("--input", input, "sequence JSON")->required();
  density->add_option("--kind", kind, "interior or exterior")->check(CLI::IsMember({"interior", "exterior"}));
  density->add_option("--grid", grid_spec, "lo:hi:step")->required();
  density->add_flag("--long-family", long_family, "exterior: long-family test instead of strong regularity");
  density->add_flag("--no-energy", no_energy, "interior: skip the energy condition");

  auto* uniform = app.add_subcommand("uniform", "d-uniformity check");
  uniform->add_option("--input", input, "sequence JSON")->required();
  uniform->add_option("--d", d, "density")->required();
  uniform->add_option("--partition", partition_path, "partition JSON");

  auto* type = app.add_subcommand("type", "lower bound for the exponential type");
  type->add_option("--input", input, "measure JSON")->required();
  type->add_flag("--separated", separated, "separated support: two-sided estimate without energy checks");
  type->add_option("--grid", grid_spec, "d grid lo:hi:step");

  auto* theorem = app.add_subcommand("theorem", "checker for one classical theorem");
  theorem->add_option("name", name, "suffgen, beurling, levinson, hybrid, debranges, krein, borichev_sodin, "
                                    "duffin_schaeffer, benedicks")
      ->required();
  theorem->add_option("--input", input, "measure or sequence JSON");
  theorem->add_option("--intervals", intervals_path, "intervals JSON");
  theorem->add_option("--sequence", sequence_path, "sequence A (suffgen)");
  theorem->add_option("--reference", reference, "second measure (borichev_sodin)");
  theorem->add_option("--weights", weights_path, "weight table K (debranges)");
  theorem->add_option("--samples", samples_path, "density samples (krein)");
  theorem->add_option("--d", d, "density (suffgen)");
  theorem->add_option("--modulus", modulus, "continuity modulus (debranges)");
  theorem->add_flag("--monotone", monotone, "samples are monotone on the divergent half-axis (krein)");
  theorem->add_option("--delta", delta, "borichev_sodin delta");
  theorem->add_option("--C", Cbs, "borichev_sodin C");
  theorem->add_option("--l", l, "borichev_sodin exponent");
  theorem->add_option("--L", L, "duffin_schaeffer half-width");
  theorem->add_option("--c", c, "duffin_schaeffer constant");
  theorem->add_option("--C1", C1);
  theorem->add_option("--C2", C2);
  theorem->add_option("--C3", C3);

  auto* construct = app.add_subcommand("construct", "build a sequence, measure or partition");
  construct->add_option("family", name, "arithmetic, perturbed, benedicks, auxiliary, alternating, measure, koosis")
      ->required();
  construct->add_option("--params", params_spec, "key=value,...");
  construct->add_option("--input", input, "base sequence (auxiliary, perturbed, measure)");
  construct->add_option("--weight", weight_name, "weight family (measure)");
  construct->add_option("--out", out.out_path, "output file");

  auto* oracle = app.add_subcommand("oracle", "smallest singular value scan of the exponential system");
  oracle->add_option("--input", input, "measure JSON")->required();
  oracle->add_option("--a-min", a_min);
  oracle->add_option("--a-max", a_max);
  oracle->add_option("--steps", steps);
  oracle->add_option("--freq-density", freq_density);
  oracle->add_flag("--extended-precision", extended, "128-bit solves where double conditioning collapses");
  oracle->add_option("--annihilator", annihilator_a, "also extract the annihilator at this a");

  auto* suite = app.add_subcommand("suite", "run the bundled acceptance examples");
  suite->add_option("--only", only, "criterion ids")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  parallel::set_threads(threads);
  try {
    if (*energy) {
      const auto seq = io::sequence_from_json(io::read_file(input));
      const Interval I = interval_bounds.size() == 2 ? Interval(interval_bounds[0], interval_bounds[1])
                                                     : Interval(std::nextafter(-seq.window(), -INFINITY), seq.window());
      out.emit(io::to_json(energy_report(seq, I)));
    } else if (*partition) {
      const auto seq = io::sequence_from_json(io::read_file(input));
      PartitionOptions po;
      po.scale = scale;
      const auto p = find_short_partition(seq, d, po);
      json j = io::to_json(p);
      j["shortness"] = io::to_json(classify_family(p));
      out.emit(j, partition_csv(p));
    } else if (*classify) {
      const auto iv = io::intervals_from_json(io::read_file(intervals_path));
      const auto v = classify_family(std::span<const Interval>(iv), coverage);
      out.emit(io::to_json(v), io::to_csv(v));
    } else if (*density) {
      const auto seq = io::sequence_from_json(io::read_file(input));
      const auto grid = parse_grid(grid_spec);
      const auto e = kind == "interior" ? interior_density(seq, grid, !no_energy) : exterior_density(seq, grid, long_family);
      out.emit(io::to_json(e), io::to_csv(e.diagnostics));
    } else if (*uniform) {
      const auto seq = io::sequence_from_json(io::read_file(input));
      std::optional<Partition> p;
      if (!partition_path.empty()) p = io::partition_from_json(io::read_file(partition_path));
      const auto r = check_d_uniform(seq, d, p);
      out.emit(io::to_json(r), io::to_csv(r.per_interval));
    } else if (*type) {
      const auto mu = io::measure_from_json(io::read_file(input));
      require(mu.size() >= 2, ErrorCode::InsufficientData, "measure needs at least 2 atoms");
      TypeOptions opt;
      if (!grid_spec.empty()) opt.d_grid = parse_grid(grid_spec);
      const auto t = separated ? type_separated(mu, opt) : type_discrete(mu, opt);
      out.emit(io::to_json(t), io::to_csv(t.diagnostics));
    } else if (*theorem) {
      const auto need = [](const std::string& path, const std::string& flag) {
        require(!path.empty(), ErrorCode::InvalidArgument, "theorem " + flag + " is required");
        return io::read_file(path);
      };
      TheoremVerdict v;
      if (name == "suffgen") {
        v = suffgen_bound(io::measure_from_json(need(input, "--input")),
                          io::sequence_from_json(need(sequence_path, "--sequence")), d);
      } else if (name == "beurling") {
        if (!intervals_path.empty()) {
          const auto iv = io::intervals_from_json(io::read_file(intervals_path));
          v = beurling_gap_check(std::span<const Interval>(iv));
        } else {
          v = beurling_gap_check(io::sequence_from_json(need(input, "--input")));
        }
      } else if (name == "levinson") {
        v = levinson_check(io::measure_from_json(need(input, "--input")));
      } else if (name == "hybrid") {
        const auto iv = io::intervals_from_json(need(intervals_path, "--intervals"));
        v = hybrid_check(io::measure_from_json(need(input, "--input")), iv);
      } else if (name == "debranges") {
        v = debranges_check(io::weight_table_from_json(need(weights_path, "--weights")),
                            io::measure_from_json(need(input, "--input")), modulus);
      } else if (name == "krein") {
        v = krein_lm_check(io::samples_from_json(need(samples_path, "--samples")), monotone);
      } else if (name == "borichev_sodin") {
        v = borichev_sodin_compare(io::measure_from_json(need(input, "--input")),
                                   io::measure_from_json(need(reference, "--reference")), delta, Cbs, l);
      } else if (name == "duffin_schaeffer") {
        v = duffin_schaeffer_check(io::measure_from_json(need(input, "--input")), L, c);
      } else if (name == "benedicks") {
        const auto iv = io::intervals_from_json(need(intervals_path, "--intervals"));
        v = benedicks_conditions(iv, C1, C2, C3);
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown theorem '" + name + "'");
      }
      out.emit(io::to_json(v));
    } else if (*construct) {
      const auto p = parse_params(params_spec);
      const double T = param(p, "T", 1000.0);
      if (name == "arithmetic") {
        const auto s = arithmetic(param(p, "d", 1.0), T);
        out.emit(io::to_json(s), io::to_csv(s));
      } else if (name == "perturbed") {
        const auto base = input.empty() ? arithmetic(param(p, "d", 1.0), T) : io::sequence_from_json(io::read_file(input));
        const auto s = perturb_exponential(base, param(p, "c", 1.0), static_cast<std::uint64_t>(param(p, "seed", 1.0)));
        out.emit(io::to_json(s), io::to_csv(s));
      } else if (name == "alternating") {
        out.emit({{"intervals", io::to_json(alternating_partition(param(p, "even", 1.0), param(p, "odd", 2.0), T))}});
      } else if (name == "benedicks") {
        const auto iv = alternating_partition(param(p, "even", 1.0), param(p, "odd", 2.0), T);
        BenedicksConstants K{param(p, "C1", 5.0), param(p, "C2", 2.0), param(p, "C3", 1.5)};
        const auto r = benedicks_sequence(iv, param(p, "C", 0.5), K);
        out.emit(io::to_json(r), io::to_csv(r.sequence));
      } else if (name == "auxiliary") {
        require(!input.empty(), ErrorCode::InvalidArgument, "auxiliary needs --input B.json");
        const auto B = io::sequence_from_json(io::read_file(input));
        const double q = param(p, "w_power", 1.0);
        std::vector<double> w;
        const auto origin = static_cast<long>(B.origin_index());
        for (std::size_t i = 0; i < B.size(); ++i)
          w.push_back(std::pow(1.0 + std::abs(static_cast<double>(static_cast<long>(i) - origin)), -q));
        const double e = param(p, "eps", 0.25);
        out.emit(io::to_json(auxiliary_sequence(B, w, e, param(p, "L", 1.0 / e))));
      } else if (name == "measure" || name == "koosis") {
        const auto support = input.empty() ? arithmetic(param(p, "d", 1.0), T) : io::sequence_from_json(io::read_file(input));
        const std::string fam = name == "koosis" ? "polynomial" : weight_name;
        std::map<std::string, double> wp;
        if (p.count("beta")) wp["beta"] = p.at("beta");
        if (p.count("c")) wp["c"] = p.at("c");
        out.emit(io::to_json(weighted_measure(support, weight_families(fam, wp))));
      } else {
        throw Error(ErrorCode::UnknownFamily, "unknown construction '" + name + "'");
      }
    } else if (*oracle) {
      const auto mu = io::measure_from_json(io::read_file(input));
      require(steps >= 2, ErrorCode::DegenerateGrid, "need at least 2 steps");
      std::vector<double> grid;
      std::size_t dropped = 0;
      for (double a : linear_grid(a_min, a_max, steps)) {
        if (a > 0) grid.push_back(a);
        else ++dropped;
      }
      OracleOptions opt;
      opt.freq_density = freq_density;
      opt.extended_precision = extended;
      const auto curve = residual_scan(mu, grid, opt);
      json j = io::to_json(curve);
      j["dropped_nonpositive"] = static_cast<std::uint64_t>(dropped);
      if (annihilator_a) j["annihilator"] = io::to_json(annihilator_extract(mu, *annihilator_a, 0, opt));
      if (out.format == "csv") {
        std::cout << io::to_csv(curve);
        json summary = {{"knee_strength", j["knee_strength"]}, {"knee", j["knee"]}, {"dropped_nonpositive", dropped}};
        std::cerr << io::canonical(summary, -1) << "\n";
      } else {
        out.emit(j);
      }
    } else if (*suite) {
      const auto results = suite::run(only.empty() ? suite::all_ids() : only);
      const auto rep = suite::report(results);
      std::string table = "id,name,pass\n";
      for (const auto& r : results) table += std::to_string(r.id) + "," + r.name + "," + (r.pass ? "pass" : "FAIL") + "\n";
      out.emit(rep, table);
      return rep["passed"] == rep["total"] ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
