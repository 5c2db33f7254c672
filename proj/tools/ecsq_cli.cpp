// ecsq_cli.cpp — command-line front end: builds certified quotient data,
// runs the dimension-4 obstruction demo, and probes intermediate stages.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "ecsq/ecsq.hpp"

namespace {

int write_certificate(const ecsq::Certificate& cert, const std::string& out_path) {
  const std::string payload = cert.dump() + "\n";
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot open output file: " << out_path << "\n";
      return 2;
    }
    out << payload;
  }
  return cert.overall() ? 0 : 1;
}

void dump_csv(const std::string& path, const ecsq::BuildArtifacts& art, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open csv file: " + path);
  out.precision(17);
  const auto& s = *art.septuple;
  out << "t,alpha,beta,gamma,f\n";
  for (int i = 0; i < s.f().size(); ++i) {
    const double t = s.f().node(i);
    out << t << ',' << s.alpha().samples()[static_cast<std::size_t>(i)] << ','
        << s.beta().samples()[static_cast<std::size_t>(i)] << ','
        << s.gamma().samples()[static_cast<std::size_t>(i)] << ','
        << s.f().samples()[static_cast<std::size_t>(i)] << '\n';
  }
  if (art.metric) {
    out << "\npoint_t,point_s,ric_tt,ric_off_tt_max,nabla_weyl_max\n";
    for (const auto& pt : ecsq::sample_points(*art.metric, 10, seed)) {
      const auto jet = ecsq::curvature_jet(*art.metric, pt);
      double offtt = 0.0;
      for (int a = 0; a < jet.n; ++a)
        for (int b = 0; b < jet.n; ++b)
          if (!(a == 0 && b == 0)) offtt = std::max(offtt, std::abs(jet.ricci(a, b)));
      out << pt.t << ',' << pt.s << ',' << jet.ricci(0, 0) << ',' << offtt << ','
          << jet.nabla_weyl.max_abs() << '\n';
    }
  }
}

// "+++" or "+,+,-" style triple, one per block
std::vector<std::array<int, 3>> parse_signs(const std::vector<std::string>& blocks) {
  std::vector<std::array<int, 3>> out;
  for (const auto& blk : blocks) {
    std::array<int, 3> triple{};
    int at = 0;
    for (char c : blk) {
      if (c == ',' || c == ' ') continue;
      if (at >= 3) throw CLI::ValidationError("--signs", "more than three signs in a block");
      if (c == '+')
        triple[static_cast<std::size_t>(at++)] = 1;
      else if (c == '-')
        triple[static_cast<std::size_t>(at++)] = -1;
      else
        throw CLI::ValidationError("--signs", std::string("unexpected character '") + c + "'");
    }
    if (at != 3) throw CLI::ValidationError("--signs", "each block needs exactly three signs");
    out.push_back(triple);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical construction and certification of compact quotient data"};
  app.require_subcommand(1);

  // ---- build ----------------------------------------------------------
  auto* build = app.add_subcommand("build", "run the full construction and emit a certificate");
  std::string config_path, out_path, csv_path;
  ecsq::BuildConfig cfg;
  std::vector<std::string> sign_blocks;
  bool j_set = false, p_set = false, k_set = false, l_set = false, theta_set = false,
       eta_set = false, n_set = false, seed_set = false;
  int arg_j = 1, arg_n = 256;
  double arg_p = 1.0, arg_theta = 1.0, arg_eta = 0.3;
  std::int64_t arg_k = 5, arg_l = 6;
  std::uint64_t arg_seed = 42;
  build->add_option("--config", config_path, "JSON config file (flags win on conflict)");
  build->add_option("--j", arg_j, "number of 3-blocks, dimension n = 3j+2")->each([&](const std::string&) { j_set = true; });
  build->add_option("--p", arg_p, "period")->each([&](const std::string&) { p_set = true; });
  build->add_option("--k", arg_k, "cubic coefficient k")->each([&](const std::string&) { k_set = true; });
  build->add_option("--l", arg_l, "cubic coefficient l")->each([&](const std::string&) { l_set = true; });
  build->add_option("--signs", sign_blocks, "sign pattern per block, e.g. +++ -++");
  build->add_option("--theta", arg_theta, "lattice parameter theta")->each([&](const std::string&) { theta_set = true; });
  build->add_option("--eta", arg_eta, "slice amplitude eta")->each([&](const std::string&) { eta_set = true; });
  build->add_option("--grid-n", arg_n, "grid resolution (power of two)")->each([&](const std::string&) { n_set = true; });
  build->add_option("--seed", arg_seed, "rng seed")->each([&](const std::string&) { seed_set = true; });
  build->add_option("--out", out_path, "certificate output file (default stdout)");
  build->add_option("--csv", csv_path, "dump sampled functions and Ricci components");

  // ---- dim4 -----------------------------------------------------------
  auto* dim4 = app.add_subcommand("dim4", "dimension-4 obstruction demo");
  std::string rho_spec = "2+cos";
  double dim4_r = 1.0, dim4_p = 1.0;
  int dim4_n = 256;
  std::string dim4_out;
  dim4->add_option("--rho", rho_spec, "preset '2+cos' or coefficients a0,a1,b1,...");
  dim4->add_option("--r", dim4_r, "constant r = a - b (nonzero)");
  dim4->add_option("--p", dim4_p, "period");
  dim4->add_option("--grid-n", dim4_n, "grid resolution");
  dim4->add_option("--out", dim4_out, "certificate output file (default stdout)");

  // ---- spec-invert ----------------------------------------------------
  auto* spinv = app.add_subcommand("spec-invert", "invert the spectrum map over the cosine slice");
  std::int64_t si_k = 5, si_l = 6;
  double si_p = 1.0, si_eta = 0.3;
  int si_n = 256;
  spinv->add_option("--k", si_k, "cubic coefficient k");
  spinv->add_option("--l", si_l, "cubic coefficient l");
  spinv->add_option("--p", si_p, "period");
  spinv->add_option("--eta", si_eta, "slice amplitude");
  spinv->add_option("--grid-n", si_n, "grid resolution");

  // ---- curvature-probe -------------------------------------------------
  auto* probe = app.add_subcommand("curvature-probe", "evaluate the curvature stack at sample points");
  std::string probe_config;
  int probe_points = 10;
  probe->add_option("--config", probe_config, "JSON config file")->required();
  probe->add_option("--points", probe_points, "number of sample points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
          std::cerr << "cannot open config file: " << config_path << "\n";
          return 2;
        }
        nlohmann::json j;
        in >> j;
        cfg = ecsq::BuildConfig::from_json(j);
      }
      if (j_set) cfg.j = arg_j;
      if (p_set) cfg.p = arg_p;
      if (k_set) cfg.k = arg_k;
      if (l_set) cfg.l = arg_l;
      if (theta_set) cfg.theta = arg_theta;
      if (eta_set) cfg.eta = arg_eta;
      if (n_set) cfg.grid_n = arg_n;
      if (seed_set) cfg.seed = arg_seed;
      if (!sign_blocks.empty()) cfg.signs = parse_signs(sign_blocks);
      cfg.validate();
      ecsq::BuildArtifacts art;
      const ecsq::Certificate cert = ecsq::build_ecs_bundle(cfg, &art);
      if (!csv_path.empty() && art.septuple) dump_csv(csv_path, art, cfg.seed);
      return write_certificate(cert, out_path);
    }

    if (*dim4) {
      const auto rho = ecsq::parse_rho(rho_spec, dim4_p, dim4_n);
      const ecsq::Certificate cert = ecsq::dim4_demo(rho, dim4_r, rho_spec);
      return write_certificate(cert, dim4_out);
    }

    if (*spinv) {
      const auto cubic = ecsq::cubic_roots(si_k, si_l);
      const auto result = ecsq::invert_spec(cubic.roots, si_p, si_eta, si_n);
      const auto rs = ecsq::xrs_to_rho_sigma(result.xrs);
      const auto sept = ecsq::rho_sigma_to_septuple(rs.rho, rs.sigma, result.xrs.r(), result.xrs.s());
      nlohmann::ordered_json j;
      j["target"] = {cubic.roots.lambda, cubic.roots.mu, cubic.roots.nu};
      j["converged"] = result.converged;
      j["iterations"] = result.iterations;
      j["residual"] = result.residual;
      j["x0"] = result.xrs.x().samples()[0] - si_eta;  // x(0) = x0 + eta
      j["r"] = result.xrs.r();
      j["s"] = result.xrs.s();
      j["riccati_residual"] = sept.riccati_residual();
      j["nonconstancy_margin"] = sept.nonconstancy_margin();
      std::cout << j.dump(2) << "\n";
      return result.converged ? 0 : 1;
    }

    if (*probe) {
      std::ifstream in(probe_config);
      if (!in) {
        std::cerr << "cannot open config file: " << probe_config << "\n";
        return 2;
      }
      nlohmann::json j;
      in >> j;
      ecsq::BuildConfig pcfg = ecsq::BuildConfig::from_json(j);
      pcfg.validate();
      const auto cubic = ecsq::cubic_roots(pcfg.k, pcfg.l);
      const auto inv = ecsq::invert_spec(cubic.roots, pcfg.p, pcfg.eta, pcfg.grid_n);
      if (!inv.converged) {
        std::cerr << "spectrum inversion did not converge\n";
        return 1;
      }
      const auto rs = ecsq::xrs_to_rho_sigma(inv.xrs);
      const auto sept = ecsq::rho_sigma_to_septuple(rs.rho, rs.sigma, inv.xrs.r(), inv.xrs.s());
      const auto path = ecsq::DiagonalOperatorPath::from_septuple_blocks(sept, pcfg.j);
      const ecsq::MetricData metric(sept.f(), path.a_entries(), ecsq::InnerSpace(pcfg.sign_pattern()));
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (const auto& pt : ecsq::sample_points(metric, probe_points, pcfg.seed)) {
        const auto jet = ecsq::curvature_jet(metric, pt);
        nlohmann::ordered_json row;
        row["t"] = pt.t;
        row["s"] = pt.s;
        row["ric_tt"] = jet.ricci(0, 0);
        row["scalar"] = jet.scalar;
        row["riemann_max"] = jet.riemann.max_abs();
        row["weyl_max"] = jet.weyl.max_abs();
        row["nabla_weyl_max"] = jet.nabla_weyl.max_abs();
        row["nabla_riemann_max"] = jet.nabla_riemann.max_abs();
        out.push_back(std::move(row));
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid configuration: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
