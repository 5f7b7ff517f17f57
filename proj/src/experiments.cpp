#include "crnapprox/experiments.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crnapprox/continuum.hpp"
#include "crnapprox/coupled.hpp"
#include "crnapprox/kmt.hpp"
#include "crnapprox/model_io.hpp"
#include "crnapprox/ssa.hpp"
#include "crnapprox/studies.hpp"

namespace crn {

namespace fs = std::filesystem;

namespace {

using Defaults = std::map<std::string, std::string>;

const std::map<std::string, Defaults, std::less<>>& all_defaults() {
  static const std::map<std::string, Defaults, std::less<>> table = {
      {"metabolism",
       {{"volume", "600"}, {"tmax", "20"}, {"seed", "1"}, {"delta", "1e-3"}, {"n0", "0.5"}, {"e0", "1.5"}}},
      {"bistable-basins",
       {{"volume", "100"},
        {"tmax", "20"},
        {"seed", "2020"},
        {"delta", "1e-3"},
        {"replications", "10000"},
        {"boundary", "absorb"}}},
      {"kmt-demo", {}},
      {"convergence",
       {{"seed", "7"},
        {"seeds", "20"},
        {"fluid_tmax", "5"},
        {"fluid_volumes", "100,1000,10000"},
        {"coupling_tmax", "2"},
        {"coupling_volumes", "200,400,800"},
        {"delta", "1e-3"},
        {"Delta", "0.1"},
        {"n0", "0.5"},
        {"e0", "0.5"},
        {"upper", "3,3"}}},
      {"coupled-demo",
       {{"seed", "3"},
        {"delta", "1e-3"},
        {"Delta", "0.1"},
        {"metabolism_volume", "600"},
        {"metabolism_tmax", "2"},
        {"metabolism_upper", "2,2"},
        {"bistable_volume", "100"},
        {"bistable_tmax", "3.5"},
        {"bistable_upper", "9,8"}}},
  };
  return table;
}

class Params {
 public:
  Params(std::string_view experiment, const std::map<std::string, std::string>& overrides)
      : values_(experiment_defaults(experiment)) {
    for (const auto& [key, value] : overrides) {
      auto it = values_.find(key);
      if (it == values_.end()) {
        std::string known;
        for (const auto& [k, v] : values_) known += (known.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown parameter '" + key + "' for experiment '" +
                                    std::string(experiment) + "' (known: " +
                                    (known.empty() ? "none" : known) + ")");
      }
      it->second = value;
    }
  }

  double real(const std::string& key) const {
    const std::string& text = values_.at(key);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) bad(key, "a number");
    return value;
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string& text = values_.at(key);
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = text.starts_with('-') ? 0 : std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) bad(key, "a non-negative integer");
    return value;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      try {
        out.push_back(std::stod(item, &used));
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) bad(key, "a comma-separated list of numbers");
    }
    if (out.empty()) bad(key, "a comma-separated list of numbers");
    return out;
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }

 private:
  [[noreturn]] void bad(const std::string& key, const char* what) const {
    throw std::invalid_argument("parameter '" + key + "' must be " + what + ", got '" +
                                values_.at(key) + "'");
  }

  std::map<std::string, std::string> values_;
};

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Output {
 public:
  Output(fs::path dir, ExperimentResult& result) : dir_(std::move(dir)), result_(result) {
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& file) {
    fs::path path = dir_ / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    result_.files.push_back(path);
    return out;
  }

 private:
  fs::path dir_;
  ExperimentResult& result_;
};

template <typename Fn>
auto timed(double& seconds, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto value = fn();
  seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return value;
}

void write_timings(Output& out, const ExperimentResult& result) {
  out.open("timings.csv") << report_timings(result.timings);
}

void run_metabolism(const Params& p, Output& out, ExperimentResult& result) {
  SimConfig cfg;
  cfg.volume = p.real("volume");
  cfg.horizon = p.real("tmax");
  cfg.seed = p.integer("seed");
  cfg.em_step = p.real("delta");
  cfg.x0 = {p.real("n0"), p.real("e0")};

  double t_ssa = 0.0, t_ode = 0.0, t_em = 0.0;
  for (int m : {0, 3}) {
    const ReactionNetwork net = make_metabolism(m);
    const std::string stem = "metabolism_m" + std::to_string(m);
    const Trajectory ssa = timed(t_ssa, [&] { return simulate_ssa(net, cfg); });
    const Trajectory ode = timed(t_ode, [&] { return solve_ode(net, cfg); });
    const Trajectory em = timed(t_em, [&] { return simulate_em(net, cfg); });
    {
      std::ofstream f = out.open(stem + "_ssa.csv");
      write_csv(f, ssa);
    }
    {
      std::ofstream f = out.open(stem + "_ode.csv");
      write_csv(f, ode);
    }
    {
      std::ofstream f = out.open(stem + "_em.csv");
      write_csv(f, em);
    }
  }
  result.timings = {{"ssa", t_ssa}, {"ode", t_ode}, {"em", t_em}};
  write_timings(out, result);
}

void run_bistable_basins(const Params& p, Output& out, ExperimentResult& result) {
  const ReactionNetwork net = make_bistable();
  SimConfig cfg;
  cfg.volume = p.real("volume");
  cfg.horizon = p.real("tmax");
  cfg.seed = p.integer("seed");
  cfg.em_step = p.real("delta");
  const std::string& boundary = p.text("boundary");
  if (boundary == "absorb") {
    cfg.boundary_policy = BoundaryPolicy::absorb;
  } else if (boundary != "clamp") {
    throw std::invalid_argument("parameter 'boundary' must be clamp or absorb, got '" + boundary + "'");
  }
  const std::size_t reps = p.integer("replications");
  const std::vector<std::vector<double>> equilibria = {{0.0, 0.0}, {6.0, 4.5}};

  std::ofstream csv = out.open("basins.csv");
  csv << "# model=" << net.name() << "\n# classification=nearest of (0,0) and (6,4.5) at t=T\n";
  csv << "x0,y0,method,fraction_basin0,replications,V,delta,seed\n";
  double t_ssa = 0.0, t_em = 0.0;
  for (double x0 : {1.95, 2.00, 2.05}) {
    for (double y0 : {0.45, 0.50, 0.55}) {
      cfg.x0 = {x0, y0};
      const BasinEstimate ssa =
          timed(t_ssa, [&] { return basin_fraction(net, cfg, Method::ssa, equilibria, reps); });
      const BasinEstimate em =
          timed(t_em, [&] { return basin_fraction(net, cfg, Method::em, equilibria, reps); });
      for (const auto& [name, est, step] :
           {std::tuple{"ssa", ssa, 0.0}, std::tuple{"em", em, cfg.em_step}}) {
        csv << g12(x0) << "," << g12(y0) << "," << name << "," << g12(est.fraction()) << ","
            << est.replications << "," << g12(cfg.volume) << "," << g12(step) << "," << cfg.seed << "\n";
      }
    }
  }
  result.timings = {{"ssa", t_ssa}, {"em", t_em}};
  write_timings(out, result);
}

void run_kmt_demo(Output& out) {
  constexpr std::array<double, 16> inputs = {-0.18, -0.93, -0.78, -1.65, -0.41, -1.10, -1.69, 2.52,
                                             1.40,  0.18,  -0.96, 1.26,  1.48,  0.52,  -2.25, 0.47};
  DyadicIncrements normals{1.0, {inputs.begin(), inputs.end()}};
  const std::size_t n = normals.values.size();
  const std::size_t levels = normals.levels();

  {
    std::ofstream csv = out.open("kmt_inputs.csv");
    csv << "i,W\n";
    for (std::size_t i = 0; i < n; ++i) csv << i + 1 << "," << g12(normals.values[i]) << "\n";
  }
  {
    const DyadicSums sums = build_dyadic_sums(normals);
    std::ofstream csv = out.open("kmt_vtilde.csv");
    csv << "q,k,Vtilde\n";
    for (std::size_t q = 1; q < levels; ++q)
      for (std::size_t k = 1; k < (n >> q); ++k) csv << q << "," << k << "," << g12(sums.vtilde(q, k)) << "\n";
  }
  KmtTrace trace;
  const DyadicIncrements poissons = kmt_transform(normals, trace);
  {
    std::ofstream csv = out.open("kmt_u.csv");
    csv << "j,k,U\n";
    for (std::size_t j = 0; j < levels; ++j)
      for (std::size_t k = 1; k < (n >> j); ++k) csv << j << "," << k << "," << g12(trace.u(j, k)) << "\n";
  }
  {
    const PairedNoise paths = assemble_paired_paths(normals, poissons);
    std::ofstream csv = out.open("kmt_paths.csv");
    csv << "k,N,W\n";
    for (std::size_t k = 0; k < paths.poisson_path.size(); ++k)
      csv << k << "," << g12(paths.poisson_path[k]) << "," << g12(paths.wiener_path[k]) << "\n";
  }
}

void run_convergence(const Params& p, Output& out) {
  const ReactionNetwork net = make_metabolism(0);
  const std::size_t seeds = p.integer("seeds");
  SimConfig cfg;
  cfg.seed = p.integer("seed");
  cfg.em_step = p.real("delta");
  cfg.kmt_step = p.real("Delta");
  cfg.x0 = {p.real("n0"), p.real("e0")};

  cfg.horizon = p.real("fluid_tmax");
  const auto fluid = fluid_limit_study(net, cfg, p.reals("fluid_volumes"), seeds);
  {
    std::ofstream csv = out.open("fluid_limit.csv");
    csv << "# model=" << net.name() << "\n# T=" << g12(cfg.horizon) << "\n# loglog_slope="
        << g12(fluid.size() >= 2 ? loglog_slope(fluid) : 0.0) << "\n";
    write_study_csv(csv, fluid);
  }

  cfg.horizon = p.real("coupling_tmax");
  cfg.domain_upper_bounds = p.reals("upper");
  const auto coupling = sup_distance_study(net, cfg, p.reals("coupling_volumes"), seeds);
  {
    std::ofstream csv = out.open("coupling.csv");
    csv << "# model=" << net.name() << "\n# T=" << g12(cfg.horizon) << "\n# Delta=" << g12(cfg.kmt_step)
        << "\n";
    write_study_csv(csv, coupling);
  }
}

void run_coupled_demo(const Params& p, Output& out) {
  SimConfig cfg;
  cfg.seed = p.integer("seed");
  cfg.em_step = p.real("delta");
  cfg.kmt_step = p.real("Delta");
  const CoupledOptions options{.keep_noise = false};

  cfg.volume = p.real("metabolism_volume");
  cfg.horizon = p.real("metabolism_tmax");
  cfg.x0 = {1.0, 1.0};
  cfg.domain_upper_bounds = p.reals("metabolism_upper");
  std::ofstream metabolism = out.open("coupled_metabolism.csv");
  write_coupled_csv(metabolism, simulate_coupled(make_metabolism(3), cfg, options));

  cfg.volume = p.real("bistable_volume");
  cfg.horizon = p.real("bistable_tmax");
  cfg.x0 = {2.0, 0.5};
  cfg.domain_upper_bounds = p.reals("bistable_upper");
  std::ofstream bistable = out.open("coupled_bistable.csv");
  write_coupled_csv(bistable, simulate_coupled(make_bistable(), cfg, options));
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"metabolism", "bistable-basins", "kmt-demo", "convergence",
                                                 "coupled-demo"};
  return names;
}

const std::map<std::string, std::string>& experiment_defaults(std::string_view name) {
  const auto& table = all_defaults();
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
  return it->second;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const Params params(spec.name, spec.overrides);
  ExperimentResult result;
  Output out(spec.output_dir, result);
  if (spec.name == "metabolism") {
    run_metabolism(params, out, result);
  } else if (spec.name == "bistable-basins") {
    run_bistable_basins(params, out, result);
  } else if (spec.name == "kmt-demo") {
    run_kmt_demo(out);
  } else if (spec.name == "convergence") {
    run_convergence(params, out);
  } else {
    run_coupled_demo(params, out);
  }
  return result;
}

std::string report_timings(std::span<const TimingRecord> timings) {
  std::string out = "method,wall_clock_seconds\n";
  const TimingRecord* ssa = nullptr;
  const TimingRecord* em = nullptr;
  for (const auto& t : timings) {
    out += t.method + "," + g12(t.seconds) + "\n";
    if (t.method == "ssa") ssa = &t;
    if (t.method == "em") em = &t;
  }
  if (ssa && em && ssa->seconds > 0.0) out += "# em_over_ssa_ratio=" + g12(em->seconds / ssa->seconds) + "\n";
  return out;
}

std::string deficiency_text(const ReactionNetwork& network) {
  const DeficiencyReport r = deficiency(network);
  std::ostringstream out;
  out << "model: " << network.name() << "\n"
      << "species: " << network.species_count() << "\n"
      << "reactions: " << network.reaction_count() << "\n"
      << "complexes: " << r.complexes_count << "\n"
      << "linkage classes: " << r.linkage_classes << "\n"
      << "stoichiometric subspace dimension: " << r.stoich_dim << "\n"
      << "deficiency: " << r.deficiency << "\n";
  return out.str();
}

std::string deficiency_json(const ReactionNetwork& network) {
  const DeficiencyReport r = deficiency(network);
  nlohmann::ordered_json j;
  j["model"] = network.name();
  j["species"] = network.species();
  j["reactions"] = network.reaction_count();
  j["complexes"] = r.complexes_count;
  j["linkage_classes"] = r.linkage_classes;
  j["linkage_class_sizes"] = linkage_class_sizes(network);
  j["stoichiometric_dimension"] = r.stoich_dim;
  j["deficiency"] = r.deficiency;
  return j.dump(2) + "\n";
}

}  // namespace crn
