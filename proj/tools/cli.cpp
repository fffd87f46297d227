#include "cli.hpp"

#include "amoebas/amoeba.hpp"
#include "amoebas/asymptotics.hpp"
#include "amoebas/ensemble.hpp"
#include "amoebas/errors.hpp"
#include "amoebas/gauss.hpp"
#include "amoebas/io.hpp"
#include "amoebas/parallel.hpp"
#include "amoebas/polytope.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace amoebas::cli {

namespace {

struct Range {
  double lo;
  double hi;
  int steps;
};

Range parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw InputError("expected lo:hi:steps, got '" + text + "'");
  const auto bounds = parse_real_list(parts[0] + "," + parts[1]);
  const auto steps = parse_integer_list(parts[2]);
  if (steps[0] < 2) throw InputError("grid steps must be at least 2 in '" + text + "'");
  if (!(bounds[0] < bounds[1])) throw InputError("empty range '" + text + "'");
  return {bounds[0], bounds[1], static_cast<int>(steps[0])};
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InputError(std::string(name) + " must be positive");
}

Json rational_array(const RationalPoint& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(to_string(c));
  return a;
}

Json real_array(const RealVector& v) {
  Json a = Json::array();
  for (double c : v) {
    if (std::isfinite(c)) {
      a.push_back(c);
    } else {
      a.push_back(c > 0 ? "inf" : (c < 0 ? "-inf" : "nan"));
    }
  }
  return a;
}

Json complex_array(const ComplexVector& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back({c.real(), c.imag()});
  return a;
}

std::string format_ratio(Complex r) {
  if (std::isnan(r.real())) return "nan";
  if (std::abs(r.imag()) <= 1e-12 * std::abs(r)) return format_real(r.real());
  return format_real(r.real()) + (r.imag() < 0 ? "" : "+") + format_real(r.imag()) + "i";
}

/// Everything a subcommand needs after parsing: the effective configuration
/// (hashed into every artifact) and where to write.
struct Context {
  std::string command;
  Json config = Json::object();
  std::string out_path;
  std::string svg_path;
  unsigned workers = 1;
  std::ostream* out = nullptr;

  std::string hash() const {
    Json c = config;
    c["command"] = command;
    return fnv1a_hex(c.dump());
  }
  std::string header() const { return "amoebas " + command + " config " + hash(); }

  void emit(const std::string& text) const {
    if (out_path.empty()) {
      *out << text;
      return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    f << text;
  }
  void emit_json(Json doc) const {
    doc["config_hash"] = hash();
    emit(doc.dump(2) + "\n");
  }
  void emit_svg(const std::vector<std::array<double, 2>>& points, const std::string& xl, const std::string& yl) const {
    if (svg_path.empty()) return;
    std::ofstream f(svg_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + svg_path + "'");
    write_svg_scatter(f, points, header(), xl, yl);
  }
};

LaurentPolynomial load_polynomial(Context& ctx, const std::string& key, const std::string& source) {
  Json doc = load_json(source);
  LaurentPolynomial p = polynomial_from_json(doc);
  ctx.config[key] = to_json(p);
  return p;
}

Spectrum load_spectrum(Context& ctx, const std::string& source) {
  Spectrum s = spectrum_from_json(load_json(source));
  ctx.config["spectrum"] = to_json(s);
  return s;
}

RationalPoint load_u(Context& ctx, const std::string& text, std::size_t n) {
  RationalPoint u = parse_rational_list(text);
  if (u.size() != n) throw InputError("--u has " + std::to_string(u.size()) + " entries, expected " + std::to_string(n));
  ctx.config["u"] = rational_array(u);
  return u;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Amoebas, Gauss contours, coefficient asymptotics and Darwin-Fowler ensembles", "amoebas"};
  app.require_subcommand(1, 1);

  Context ctx;
  ctx.out = &out;
  unsigned workers = default_workers();
  std::function<void()> action;

  auto common = [&](CLI::App* sub, bool svg) {
    sub->add_option("--out", ctx.out_path, "Output file (default: standard output)");
    sub->add_option("--workers", workers, "Worker threads (output does not depend on it)")->check(CLI::PositiveNumber);
    if (svg) sub->add_option("--svg", ctx.svg_path, "Also write an SVG scatter plot");
  };

  // amoeba
  std::string poly, x1_range = "-4:4:200";
  int phases = 256;
  {
    auto* sub = app.add_subcommand("amoeba", "Point cloud (x1, log|z2|) of a planar amoeba");
    sub->add_option("--poly", poly, "Polynomial JSON (file or inline)")->required();
    sub->add_option("--x1", x1_range, "lo:hi:steps for x1")->capture_default_str();
    sub->add_option("--phases", phases, "Phase samples of z1 per x1")->capture_default_str();
    common(sub, true);
    sub->callback([&] {
      action = [&] {
        ctx.command = "amoeba";
        const auto q = load_polynomial(ctx, "poly", poly);
        if (q.dimension() != 2) throw InputError("amoeba: the polynomial must have two variables");
        const Range r = parse_range(x1_range);
        if (phases < 1) throw InputError("--phases must be positive");
        ctx.config["x1"] = {r.lo, r.hi, r.steps};
        ctx.config["phases"] = phases;
        const PointCloud cloud = render2d(q, r.lo, r.hi, r.steps, phases, ctx.workers);
        std::ostringstream csv;
        csv << "# " << ctx.header() << "\n# degenerate_fibers " << cloud.degenerate_fibers << "\nx1,x2\n";
        for (const auto& p : cloud.points) csv << format_real(p[0]) << ',' << format_real(p[1]) << '\n';
        ctx.emit(csv.str());
        ctx.emit_svg(cloud.points, "x1", "x2");
      };
    });
  }

  // order
  std::string x_list;
  int order_phases = 64;
  double tol = 1e-6;
  {
    auto* sub = app.add_subcommand("order", "Membership verdict and order vector at a point");
    sub->add_option("--poly", poly, "Polynomial JSON (file or inline)")->required();
    sub->add_option("--x", x_list, "Comma-separated point")->required();
    sub->add_option("--phases", order_phases, "Phase samples per fiber")->capture_default_str();
    sub->add_option("--tol", tol, "Membership tolerance")->capture_default_str();
    common(sub, false);
    sub->callback([&] {
      action = [&] {
        ctx.command = "order";
        const auto q = load_polynomial(ctx, "poly", poly);
        const auto x = parse_real_list(x_list);
        require_positive(tol, "--tol");
        ctx.config["x"] = x;
        ctx.config["phases"] = order_phases;
        ctx.config["tol"] = tol;
        const Membership m = membership(q, x, order_phases, tol);
        Json doc{{"x", x}, {"verdict", to_string(m.verdict)}, {"fiber_axis", m.axis}, {"distance", m.distance}};
        doc["witness"] = m.witness ? complex_array(*m.witness) : Json(nullptr);
        doc["order"] = m.verdict == Verdict::Outside ? Json(order(q, x, order_phases)) : Json(nullptr);
        ctx.emit_json(doc);
      };
    });
  }

  // components
  std::vector<std::string> grids{"-6:6:41"};
  std::optional<double> depth;
  {
    auto* sub = app.add_subcommand("components", "Vertex components and grid detection of complement components");
    sub->add_option("--poly", poly, "Polynomial JSON (file or inline)")->required();
    sub->add_option("--grid", grids, "lo:hi:steps, once for all axes or once per axis")->capture_default_str();
    sub->add_option("--phases", order_phases, "Phase samples per fiber")->capture_default_str();
    sub->add_option("--tol", tol, "Membership tolerance")->capture_default_str();
    sub->add_option("--depth", depth, "Probe depth for vertex components (default: 5 + vertex diameter)");
    common(sub, false);
    sub->callback([&] {
      action = [&] {
        ctx.command = "components";
        const auto q = load_polynomial(ctx, "poly", poly);
        const std::size_t n = q.dimension();
        if (grids.size() != 1 && grids.size() != n) throw InputError("--grid must be given once or once per axis");
        require_positive(tol, "--tol");
        Grid grid;
        Json grid_cfg = Json::array();
        for (std::size_t j = 0; j < n; ++j) {
          const Range r = parse_range(grids[grids.size() == 1 ? 0 : j]);
          grid.lo.push_back(r.lo);
          grid.hi.push_back(r.hi);
          grid.steps.push_back(r.steps);
          grid_cfg.push_back({r.lo, r.hi, r.steps});
        }
        ctx.config["grid"] = grid_cfg;
        ctx.config["phases"] = order_phases;
        ctx.config["tol"] = tol;
        ctx.config["depth"] = depth ? Json(*depth) : Json(nullptr);

        Json doc;
        doc["newton_polytope"] = to_json(newton_polytope(q));
        Json vertices = Json::array();
        for (const auto& c : vertex_components(q, depth, order_phases)) {
          vertices.push_back({{"order", c.vertex},
                              {"representative", c.representative},
                              {"verified", c.verified},
                              {"observed", c.observed ? Json(*c.observed) : Json(nullptr)}});
        }
        doc["vertex_components"] = vertices;
        const ComponentReport report = detect_components(q, grid, order_phases, tol, ctx.workers);
        Json comps = Json::array();
        for (const auto& c : report.components) {
          comps.push_back({{"order", c.order},
                           {"representative", c.representative},
                           {"bounded", c.bounded},
                           {"cells", c.cells.size()}});
        }
        doc["components"] = comps;
        doc["inside_cells"] = report.inside_cells;
        doc["uncertain_cells"] = report.uncertain_cells;
        doc["order_jumps"] = report.order_jumps;
        ctx.emit_json(doc);
      };
    });
  }

  // contour
  int sweep_steps = 90, seed_grid = 6;
  double contour_tol = 1e-8;
  {
    auto* sub = app.add_subcommand("contour", "Contour points Log(gamma^-1(real directions))");
    sub->add_option("--poly", poly, "Polynomial JSON (file or inline)")->required();
    sub->add_option("--steps", sweep_steps, "Directions per half turn (polar steps for n = 3)")->capture_default_str();
    sub->add_option("--seed-grid", seed_grid, "Fresh seeds per direction")->capture_default_str();
    sub->add_option("--tol", contour_tol, "Projective tolerance for accepting a point")->capture_default_str();
    common(sub, true);
    sub->callback([&] {
      action = [&] {
        ctx.command = "contour";
        const auto q = load_polynomial(ctx, "poly", poly);
        require_positive(contour_tol, "--tol");
        if (sweep_steps < 1 || seed_grid < 1) throw InputError("--steps and --seed-grid must be positive");
        ctx.config["steps"] = sweep_steps;
        ctx.config["seed_grid"] = seed_grid;
        ctx.config["tol"] = contour_tol;
        ContourOptions opt;
        opt.tol = contour_tol;
        opt.seed_grid = seed_grid;
        opt.workers = ctx.workers;
        const auto points = contour(q, direction_sweep(q.dimension(), sweep_steps), {}, opt);
        std::ostringstream csv;
        csv << "# " << ctx.header() << "\nq_angle";
        for (std::size_t j = 0; j < q.dimension(); ++j) csv << ",x" << j + 1;
        csv << ",branch_id\n";
        std::vector<std::array<double, 2>> plane;
        for (const auto& p : points) {
          csv << format_real(p.angle);
          for (double v : p.x) csv << ',' << format_real(v);
          csv << ',' << p.branch << '\n';
          if (p.x.size() == 2) plane.push_back({p.x[0], p.x[1]});
        }
        ctx.emit(csv.str());
        ctx.emit_svg(plane, "x1", "x2");
      };
    });
  }

  // coeffs and asymp share their inputs.
  std::string p_src, q_src, direction_text, k_text, vertex_text;
  long max_order = 4096;
  auto coefficient_inputs = [&](CLI::App* sub) {
    sub->add_option("--p", p_src, "Numerator JSON (default: 1)");
    sub->add_option("--q", q_src, "Denominator JSON")->required();
    sub->add_option("--direction", direction_text, "Integer direction q, comma-separated")->required();
    sub->add_option("--k", k_text, "Comma-separated multiples k")->required();
    sub->add_option("--vertex", vertex_text, "Vertex of Newt(Q) selecting the expansion (default: from the direction)");
    sub->add_option("--max-order", max_order, "Expansion-order budget of the exact oracle")->capture_default_str();
    common(sub, false);
  };
  struct CoefficientJob {
    LaurentPolynomial p, q;
    ExponentVector direction;
    std::vector<long> ks;
    std::optional<ExponentVector> vertex;
  };
  auto load_coefficient_job = [&]() {
    CoefficientJob job;
    job.q = load_polynomial(ctx, "q", q_src);
    const std::size_t n = job.q.dimension();
    job.p = p_src.empty() ? LaurentPolynomial::constant(n, 1.0) : load_polynomial(ctx, "p", p_src);
    if (p_src.empty()) ctx.config["p"] = to_json(job.p);
    if (job.p.dimension() != n) throw InputError("--p and --q have different dimensions");
    job.direction = parse_integer_list(direction_text);
    if (job.direction.size() != n) throw InputError("--direction has the wrong length");
    job.ks = parse_integer_list(k_text);
    for (long k : job.ks) {
      if (k < 1) throw InputError("--k entries must be positive");
    }
    if (!vertex_text.empty()) {
      job.vertex = parse_integer_list(vertex_text);
      if (job.vertex->size() != n) throw InputError("--vertex has the wrong length");
    }
    if (max_order < 1) throw InputError("--max-order must be positive");
    ctx.config["direction"] = job.direction;
    ctx.config["k"] = job.ks;
    ctx.config["vertex"] = job.vertex ? Json(*job.vertex) : Json(nullptr);
    ctx.config["max_order"] = max_order;
    return job;
  };
  {
    auto* sub = app.add_subcommand("coeffs", "Exact diagonal Laurent coefficients c_{qk} of P/Q");
    coefficient_inputs(sub);
    sub->callback([&] {
      action = [&] {
        ctx.command = "coeffs";
        const CoefficientJob job = load_coefficient_job();
        const ExponentVector vertex = job.vertex ? *job.vertex : expansion_vertex(job.q, job.direction);
        const auto exact = diagonal_coefficients(job.p, job.q, job.direction, job.ks, vertex, max_order, ctx.workers);
        std::ostringstream csv;
        csv << "# " << ctx.header() << "\n# vertex";
        for (long v : vertex) csv << ' ' << v;
        csv << "\nk,exact\n";
        for (std::size_t i = 0; i < job.ks.size(); ++i) csv << job.ks[i] << ',' << to_string(exact[i]) << '\n';
        ctx.emit(csv.str());
      };
    });
  }
  {
    auto* sub = app.add_subcommand("asymp", "Leading asymptotics of c_{qk} against the exact oracle");
    coefficient_inputs(sub);
    sub->callback([&] {
      action = [&] {
        ctx.command = "asymp";
        const CoefficientJob job = load_coefficient_job();
        CompareOptions opt;
        opt.vertex = job.vertex;
        opt.max_order = max_order;
        opt.workers = ctx.workers;
        const Comparison c = compare(job.p, job.q, job.direction, job.ks, opt);
        const AsymptoticEstimate& e = c.estimate;
        std::ostringstream csv;
        csv << "# " << ctx.header() << "\n# saddle";
        for (const auto& z : e.saddle) csv << ' ' << format_ratio(z);
        csv << "\n# constant " << format_ratio(e.constant) << "\n# hessian_determinant "
            << format_ratio(e.hessian.determinant) << "\n# eliminated_axis " << e.hessian.eliminated_axis
            << "\n# vertex";
        for (long v : c.vertex) csv << ' ' << v;
        csv << "\n# branch_flipped " << (c.branch_flipped ? "true" : "false") << "\n# simple_boundary "
            << (e.simple_boundary ? "true" : "false") << '\n';
        for (const auto& w : e.warnings) csv << "# warning " << w << '\n';
        try {
          csv << "# error_slope " << format_real(error_slope(c.rows)) << '\n';
        } catch (const InputError&) {
          // Fewer than two rows with a nonzero error: no slope to report.
        }
        csv << "k,exact,estimate,ratio\n";
        for (const auto& row : c.rows) {
          csv << row.k << ',' << to_string(row.exact) << ',' << format_exp(row.log_estimate) << ','
              << format_ratio(row.ratio) << '\n';
        }
        ctx.emit(csv.str());
      };
    });
  }

  // ensemble-solve
  std::string spectrum_src, u_text;
  double particles = 1.0;
  {
    auto* sub = app.add_subcommand("ensemble-solve", "z(u), entropy, temperatures and occupations");
    sub->add_option("--spectrum", spectrum_src, "Spectrum JSON (file or inline)")->required();
    sub->add_option("--u", u_text, "Mean energy, comma-separated rationals (p/q)")->required();
    sub->add_option("--N", particles, "Number of particles for the occupations")->capture_default_str();
    common(sub, false);
    sub->callback([&] {
      action = [&] {
        ctx.command = "ensemble-solve";
        const Spectrum s = load_spectrum(ctx, spectrum_src);
        const RationalPoint u = load_u(ctx, u_text, s.dimension());
        require_positive(particles, "--N");
        ctx.config["N"] = particles;
        const EnsembleSolution sol = solve_mean_energy(s, u);
        Json doc{{"u", rational_array(u)},
                 {"z", real_array(sol.z)},
                 {"log_z", real_array(sol.x)},
                 {"mu", real_array(sol.mu)},
                 {"temperature", real_array(sol.temperature)},
                 {"entropy", sol.entropy},
                 {"gradient_norm", sol.gradient_norm},
                 {"iterations", sol.iterations},
                 {"N", particles},
                 {"occupations", real_array(occupations(s, sol, particles))}};
        ctx.emit_json(doc);
      };
    });
  }

  // ensemble-exact
  long n_particles = 1;
  std::string energy_text, method = "series";
  {
    auto* sub = app.add_subcommand("ensemble-exact", "Exact state count and average occupations for (N, E)");
    sub->add_option("--spectrum", spectrum_src, "Spectrum JSON (file or inline)")->required();
    sub->add_option("--N", n_particles, "Number of particles")->required();
    sub->add_option("--E", energy_text, "Total integer energy of the unshifted levels, comma-separated")->required();
    sub->add_option("--method", method, "series, enumerate or both")
        ->check(CLI::IsMember({"series", "enumerate", "both"}))
        ->capture_default_str();
    common(sub, false);
    sub->callback([&] {
      action = [&] {
        ctx.command = "ensemble-exact";
        const Spectrum s = load_spectrum(ctx, spectrum_src);
        const ExponentVector energy = parse_integer_list(energy_text);
        ctx.config["N"] = n_particles;
        ctx.config["E"] = energy;
        ctx.config["method"] = method;
        ExactStats stats = method == "enumerate" ? enumerate_states(s, n_particles, energy)
                                                 : exact_stats(s, n_particles, energy);
        Json doc{{"N", n_particles}, {"E", energy}, {"total_states", stats.total_states.str()}};
        doc["averages"] = rational_array(stats.averages);
        if (method == "both") {
          const ExactStats other = enumerate_states(s, n_particles, energy);
          const bool agree = other.total_states == stats.total_states && other.averages == stats.averages;
          doc["routes_agree"] = agree;
          if (!agree) {
            ctx.emit_json(doc);
            throw NumericalError("ensemble-exact: series and enumeration disagree");
          }
        }
        ctx.emit_json(doc);
      };
    });
  }

  // ensemble-compare
  std::string n_list;
  {
    auto* sub = app.add_subcommand("ensemble-compare", "Exact average occupations against N z^e/Z");
    sub->add_option("--spectrum", spectrum_src, "Spectrum JSON (file or inline)")->required();
    sub->add_option("--u", u_text, "Mean energy, comma-separated rationals (p/q)")->required();
    sub->add_option("--N", n_list, "Comma-separated particle counts")->required();
    common(sub, false);
    sub->callback([&] {
      action = [&] {
        ctx.command = "ensemble-compare";
        const Spectrum s = load_spectrum(ctx, spectrum_src);
        const RationalPoint u = load_u(ctx, u_text, s.dimension());
        const auto ns = parse_integer_list(n_list);
        ctx.config["N"] = ns;
        const auto rows = occupation_comparison(s, u, ns, ctx.workers);
        double worst = 0.0;
        for (const auto& r : rows) worst = std::max(worst, r.relative_error);
        std::ostringstream csv;
        csv << "# " << ctx.header() << "\n# max_relative_error " << format_real(worst)
            << "\nN,k,exact,asymptotic,relative_error\n";
        for (const auto& r : rows) {
          csv << r.particles << ',' << r.level << ',' << to_string(r.exact) << ',' << format_real(r.asymptotic) << ','
              << format_real(r.relative_error) << '\n';
        }
        ctx.emit(csv.str());
      };
    });
  }

  // admissible
  {
    auto* sub = app.add_subcommand("admissible", "Is u interior to the hull of the (untruncated) spectrum?");
    sub->add_option("--spectrum", spectrum_src, "Spectrum JSON (file or inline)")->required();
    sub->add_option("--u", u_text, "Mean energy, comma-separated rationals (p/q)")->required();
    common(sub, false);
    sub->callback([&] {
      action = [&] {
        ctx.command = "admissible";
        const Spectrum s = load_spectrum(ctx, spectrum_src);
        const RationalPoint u = load_u(ctx, u_text, s.dimension());
        const std::string verdict = admissible(s, u) ? "true" : "false";
        // Standard output gets the bare verdict; a file also records the config.
        if (ctx.out_path.empty()) {
          ctx.emit(verdict + "\n");
        } else {
          ctx.emit("# " + ctx.header() + "\n" + verdict + "\n");
        }
      };
    });
  }

  std::vector<std::string> argv_storage{"amoebas"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  ctx.workers = workers;
  try {
    action();
    return 0;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    if (e.residual() != 0.0) err << "best residual: " << format_real(e.residual()) << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace amoebas::cli
