#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "circuma/approximation.hpp"
#include "circuma/hyperbolicity.hpp"
#include "circuma/koebe.hpp"
#include "circuma/report.hpp"
#include "circuma/sphere_bridge.hpp"
#include "circuma/svg.hpp"

using namespace circuma;

namespace {

cpx parse_point(const std::string& s) {
  double x = 0, y = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf", &x, &y) != 2)
    throw error(errc::io_error, "expected a point as x,y: " + s);
  return cpx(x, y);
}

Curve parse_curve(const std::string& s) {
  std::vector<cpx> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';'))
    if (!tok.empty()) v.push_back(parse_point(tok));
  if (v.size() < 2) throw error(errc::io_error, "curve needs at least two x,y points");
  return Curve(std::move(v));
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) v.push_back(std::stod(tok));
  return v;
}

int threads_from_env() {
  const char* t = std::getenv("CIRCUMA_THREADS");
  if (!t) return 1;
  int n = std::atoi(t);
  return n > 0 ? n : 1;
}

std::string fmt_point(cpx z) { return fmt_value(z.real()) + "," + fmt_value(z.imag()); }

void save_chain(const MapChain& chain, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw error(errc::io_error, "cannot write chain file " + path);
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& s : chain.steps) {
    if (const auto* a = std::get_if<AffineStep>(&s)) {
      f << "affine " << num(a->a.real()) << " " << num(a->a.imag()) << " " << num(a->b.real())
        << " " << num(a->b.imag()) << "\n";
    } else if (const auto* j = std::get_if<InvJoukowskiStep>(&s)) {
      f << "invjoukowski " << num(j->center.real()) << " " << num(j->center.imag()) << " "
        << num(j->halflen) << " " << num(j->rot) << "\n";
    } else if (const auto* l = std::get_if<LaurentInvStep>(&s)) {
      f << "laurentinv " << num(l->g.cap) << " " << num(l->g.c0.real()) << " "
        << num(l->g.c0.imag()) << " " << l->g.c.size();
      for (cpx ck : l->g.c) f << " " << num(ck.real()) << " " << num(ck.imag());
      f << "\n";
    }
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  ~Timer() {
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "wall_time_s=%.3f\n", s);
  }
};

RecordStatus status_of(bool pass) { return pass ? RecordStatus::pass : RecordStatus::fail; }

void maybe_svg(const std::string& path, const DomainSpec& dom,
               const std::vector<SvgOverlay>& overlays) {
  if (!path.empty()) write_svg(dom, overlays, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circuma: quasihyperbolic geometry and circle-domain uniformization toolkit"};
  app.require_subcommand(1);
  // --h is a resolution flag here, so keep only the long help form
  app.set_help_flag("--help", "print help");

  // shared option storage
  std::string domain_path, svg_path, out_dir;
  std::string from_s, to_s, flavor_s = "euclidean", curve_s, thresholds_s;
  std::vector<std::string> pair_s, ball_s, sample_s;
  double h = 1e-2, tol = 1e-6, A_est = 0.0, count_r = 0.0, count_R = 0.0, llc_M = 2.0, a_radius = 1.0;
  int m_samples = 16, max_sweeps = 50;
  uint64_t seed = 1;

  auto add_domain = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--domain", domain_path, "domain spec file (json)")->required();
    cmd->add_option("--svg", svg_path, "write an SVG rendering to this path");
  };

  auto* qh = app.add_subcommand("qh-dist", "quasihyperbolic distance between two points");
  add_domain(qh);
  qh->add_option("--from", from_s, "start point x,y")->required();
  qh->add_option("--to", to_s, "end point x,y")->required();
  qh->add_option("--flavor", flavor_s, "euclidean or spherical");
  qh->add_option("--h", h, "grid resolution");

  auto* de = app.add_subcommand("delta-estimate", "Gromov hyperbolicity estimate");
  add_domain(de);
  de->add_option("--m", m_samples, "number of sample points");
  de->add_option("--flavor", flavor_s, "euclidean or spherical");
  de->add_option("--h", h, "grid resolution");
  de->add_option("--seed", seed, "sampling seed");

  auto* cu = app.add_subcommand("check-uniform", "uniformity constant estimate over point pairs");
  add_domain(cu);
  cu->add_option("--pair", pair_s, "pair as ax,ay:bx,by (repeatable)")->required();
  cu->add_option("--h", h, "grid resolution");

  auto* vg = app.add_subcommand("verify-geometry", "separation / turning / counting / LLC checks");
  add_domain(vg);
  vg->add_option("--A", A_est, "uniformity constant estimate")->required();
  vg->add_option("--count-r", count_r, "diameter threshold for the counting bound");
  vg->add_option("--count-R", count_R, "ball radius for the counting bound");
  vg->add_option("--ball", ball_s, "LLC ball as x,y,r (repeatable)");
  vg->add_option("--M", llc_M, "LLC factor");
  vg->add_option("--h", h, "grid resolution");

  auto* ap = app.add_subcommand("approximate", "finitely connected approximation sequence");
  add_domain(ap);
  ap->add_option("--thresholds", thresholds_s, "decreasing diameters d1,d2,...")->required();
  ap->add_option("--out", out_dir, "output directory for stage files")->required();

  auto* un = app.add_subcommand("uniformize", "Koebe iteration onto a circle domain");
  add_domain(un);
  un->add_option("--out", out_dir, "output directory for chain + circles files")->required();
  un->add_option("--max-sweeps", max_sweeps, "sweep budget");
  un->add_option("--tol", tol, "circularity tolerance");

  auto* sc = app.add_subcommand("sphere-check", "spherical-euclidean surgery and distance lemma");
  add_domain(sc);
  sc->add_option("--a", a_radius, "complement containment radius a")->required();
  sc->add_option("--curve", curve_s, "curve as x,y;x,y;... for the surgery");
  sc->add_option("--sample", sample_s, "distance-lemma sample x,y (repeatable)");

  auto* dm = app.add_subcommand("demo", "small canned pipeline writing reports and pictures");
  dm->set_help_flag("--help", "print help");
  dm->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  Timer timer;
  Report rep;
  rep.echo("threads", std::to_string(threads_from_env()));
  try {
    if (qh->parsed()) {
      rep.command = "qh-dist";
      DomainSpec dom = load_domain(domain_path);
      MetricFlavor fl =
          flavor_s == "spherical" ? MetricFlavor::spherical : MetricFlavor::euclidean;
      cpx x = parse_point(from_s), y = parse_point(to_s);
      rep.echo("domain", dom.name());
      rep.echo("h", h);
      rep.echo("flavor", flavor_s);
      auto res = qh_distance(dom, PlanePoint(x), PlanePoint(y), fl, h);
      rep.add(make_record(fl == MetricFlavor::spherical ? "qh.dist.spherical" : "qh.dist",
                          fmt_value(res.value), "-", RecordStatus::estimate));
      for (size_t i = 0; i < res.path.size(); ++i)
        rep.echo("path." + std::to_string(i), fmt_point(res.path[i]));
      maybe_svg(svg_path, dom, {SvgOverlay::curve(res.path)});
    } else if (de->parsed()) {
      rep.command = "delta-estimate";
      DomainSpec dom = load_domain(domain_path);
      MetricFlavor fl =
          flavor_s == "spherical" ? MetricFlavor::spherical : MetricFlavor::euclidean;
      rep.echo("domain", dom.name());
      rep.echo("h", h);
      rep.echo("m", std::to_string(m_samples));
      rep.echo("seed", std::to_string(seed));
      auto est = delta_four_point(dom, m_samples, fl, h, seed);
      rep.echo("resolution", est.resolution);
      rep.echo("sample_size", std::to_string(est.sample_size));
      rep.add(make_record("delta.four_point", fmt_value(est.delta_four_point), "-",
                          RecordStatus::estimate));
      maybe_svg(svg_path, dom, {});
    } else if (cu->parsed()) {
      rep.command = "check-uniform";
      DomainSpec dom = load_domain(domain_path);
      rep.echo("domain", dom.name());
      rep.echo("h", h);
      std::vector<std::pair<cpx, cpx>> pairs;
      for (const auto& p : pair_s) {
        auto colon = p.find(':');
        if (colon == std::string::npos)
          throw error(errc::io_error, "expected pair as ax,ay:bx,by");
        pairs.emplace_back(parse_point(p.substr(0, colon)), parse_point(p.substr(colon + 1)));
      }
      auto est = estimate_uniformity(dom, pairs, h);
      std::vector<SvgOverlay> overlays;
      for (const auto& row : est.table) {
        rep.add(
            make_record("uniform.cigar_length", row.A_curve, est.A_est, RecordStatus::estimate));
        rep.add(
            make_record("uniform.quasiconvex", row.quasiconvex, est.A_est, RecordStatus::estimate));
      }
      rep.add(make_record("uniform.A_est", fmt_value(est.A_est), "-", RecordStatus::estimate));
      maybe_svg(svg_path, dom, overlays);
    } else if (vg->parsed()) {
      rep.command = "verify-geometry";
      DomainSpec dom = load_domain(domain_path);
      rep.echo("domain", dom.name());
      rep.echo("A", A_est);
      auto sep = verify_separation(dom, A_est);
      if (!sep.empty)
        rep.add(make_record("uniform.separation", sep.implied_A, A_est + 1.0,
                            status_of(sep.flagged.empty())));
      for (size_t i = 0; i < dom.components().size(); ++i) {
        double t = verify_bounded_turning(dom.components()[i]);
        rep.add(make_record("uniform.turning", t, 2.0 * (A_est + 1.0) * (A_est + 1.0),
                            status_of(t <= 2.0 * (A_est + 1.0) * (A_est + 1.0))));
      }
      if (count_r > 0.0 && count_R > 0.0) {
        auto cnt = count_large_components(dom, count_r, count_R, A_est);
        rep.add(make_record("uniform.count", static_cast<double>(cnt.count), cnt.bound,
                            status_of(cnt.count <= cnt.bound)));
      }
      if (!ball_s.empty()) {
        std::vector<std::pair<cpx, double>> balls;
        for (const auto& b : ball_s) {
          double x, y, r;
          if (std::sscanf(b.c_str(), "%lf,%lf,%lf", &x, &y, &r) != 3)
            throw error(errc::io_error, "expected ball as x,y,r");
          balls.emplace_back(cpx(x, y), r);
        }
        auto llc = check_llc(dom, balls, llc_M);
        rep.add(make_record("uniform.llc",
                            static_cast<double>(llc.llc1_failures + llc.llc2_failures), 0.0,
                            status_of(llc.llc1_failures + llc.llc2_failures == 0)));
      }
      maybe_svg(svg_path, dom, {});
    } else if (ap->parsed()) {
      rep.command = "approximate";
      DomainSpec dom = load_domain(domain_path);
      rep.echo("domain", dom.name());
      rep.echo("thresholds", thresholds_s);
      auto seq = approximation_sequence(dom, parse_doubles(thresholds_s));
      std::filesystem::create_directories(out_dir);
      for (size_t i = 0; i < seq.domains.size(); ++i)
        save_domain(seq.domains[i], out_dir + "/stage" + std::to_string(i + 1) + ".json");
      rep.add(make_record("approx.nesting", "verified", "-", RecordStatus::pass));
      rep.add(make_record("approx.residual", static_cast<double>(seq.residual.size()), 0.0,
                          RecordStatus::estimate));
      maybe_svg(svg_path, dom, {});
    } else if (un->parsed()) {
      rep.command = "uniformize";
      DomainSpec dom = load_domain(domain_path);
      rep.echo("domain", dom.name());
      rep.echo("max_sweeps", std::to_string(max_sweeps));
      rep.echo("tol", tol);
      auto res = koebe_iterate(dom, max_sweeps, tol);
      std::filesystem::create_directories(out_dir);
      save_chain(res.chain, out_dir + "/chain.txt");
      save_domain(res.circles.as_domain(dom.name() + "-circles"), out_dir + "/circles.json");
      rep.echo("sweeps", std::to_string(res.sweeps));
      double worst = 0.0;
      if (!res.trace.sweeps.empty())
        for (double c : res.trace.sweeps.back().circularity) worst = std::max(worst, c);
      rep.add(make_record("koebe.circularity", worst, tol, status_of(worst <= tol)));
      rep.add(make_record("koebe.a1", fmt_value(std::abs(res.a1)), "-", RecordStatus::estimate));
      rep.add(make_record("koebe.normalization", "f(z)=z+a1/z+...", "-", RecordStatus::pass));
      maybe_svg(svg_path, res.circles.as_domain(dom.name() + "-circles"), {});
    } else if (sc->parsed()) {
      rep.command = "sphere-check";
      DomainSpec dom = load_domain(domain_path);
      rep.echo("domain", dom.name());
      rep.echo("a", a_radius);
      if (!sample_s.empty()) {
        std::vector<cpx> samples;
        for (const auto& s : sample_s) samples.push_back(parse_point(s));
        auto lem = check_distance_lemma(dom, a_radius, samples);
        rep.add(make_record("sphere.distance_lemma",
                            lem.all_hold ? "all-hold" : "violated", fmt_value(lem.C),
                            status_of(lem.all_hold)));
      }
      std::vector<SvgOverlay> overlays;
      for (double r : {a_radius, 2 * a_radius, 3 * a_radius})
        overlays.push_back(SvgOverlay::circle(cpx(0, 0), r));
      if (!curve_s.empty()) {
        Curve curve = parse_curve(curve_s);
        auto sur = spherical_to_euclidean_surgery(curve, dom, a_radius);
        rep.echo("case", surgery_case_name(sur.surgery_case));
        for (const auto& arc : sur.arcs)
          rep.add(make_record("sphere.arc_bound", arc.arc_len_e,
                              0.5 * kPi * std::abs(arc.z1 - arc.z2),
                              status_of(arc.arc_len_e <=
                                        0.5 * kPi * std::abs(arc.z1 - arc.z2) * (1 + 1e-9))));
        rep.add(make_record("sphere.length_bound", sur.len_e_output,
                            2.0 * sur.K * sur.len_s_input, status_of(sur.length_bound_holds)));
        rep.add(make_record("sphere.case", surgery_case_name(sur.surgery_case), "-",
                            RecordStatus::estimate));
        overlays.push_back(SvgOverlay::curve(sur.input, "#cf222e"));
        overlays.push_back(SvgOverlay::curve(sur.output, "#1f6feb"));
      }
      maybe_svg(svg_path, dom, overlays);
    } else if (dm->parsed()) {
      rep.command = "demo";
      std::filesystem::create_directories(out_dir);
      DomainSpec disc("unit-disc-complement", {BoundaryComponent::disc(cpx(0, 0), 1.0)}, true,
                      std::nullopt);
      DomainSpec slit("slit", {BoundaryComponent::segment(cpx(-2, 0), cpx(2, 0))}, true,
                      std::nullopt);
      save_domain(disc, out_dir + "/disc.json");
      save_domain(slit, out_dir + "/slit.json");
      auto res = qh_distance(disc, PlanePoint(cpx(2, 0)), PlanePoint(cpx(3, 0)),
                             MetricFlavor::euclidean, 1e-2);
      rep.add(make_record("qh.dist", fmt_value(res.value), "-", RecordStatus::estimate));
      write_svg(disc, {SvgOverlay::curve(res.path)}, out_dir + "/qh-dist.svg");
      auto koebe = koebe_iterate(slit);
      save_chain(koebe.chain, out_dir + "/slit-chain.txt");
      save_domain(koebe.circles.as_domain("slit-circles"), out_dir + "/slit-circles.json");
      rep.add(make_record("koebe.a1", fmt_value(std::abs(koebe.a1)), "-", RecordStatus::estimate));
      write_svg(koebe.circles.as_domain("slit-circles"), {}, out_dir + "/slit-circles.svg");
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  rep.emit(std::cout);
  return rep.ok() ? 0 : 1;
}
