// Command-line front end: loads game files, runs the solver, sweeps and
// traces the uncertainty level, and exposes the duopoly closed forms.
// Emits JSON or CSV with all floats at 9 significant digits; identical
// invocations produce byte-identical output.
//
// Exit codes: 0 success, 1 I/O or parse error, 2 math/validation findings.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robusteq/continuation.hpp"
#include "robusteq/cournot.hpp"
#include "robusteq/equilibrium.hpp"
#include "robusteq/game.hpp"
#include "robusteq/worstcase.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace robusteq;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitFindings = 2;

// Rounds to 9 significant digits so the JSON serializer prints exactly
// that many.
double sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json num(double v) { return json(sig9(v)); }

json profile_json(const std::vector<double>& p) {
  json arr = json::array();
  for (double v : p) arr.push_back(num(v));
  return arr;
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + out_path + "'");
  out << text;
}

Game load_game_file(const std::string& path) { return load_game(read_file(path)); }

// Validation gate shared by the solver-driving commands.
void require_valid(const Game& g, int samples) {
  auto findings = validate_assumptions(g, samples);
  if (findings.empty()) return;
  for (const auto& f : findings)
    std::cerr << "finding [" << f.code << "] player " << f.player << ": " << f.message << "\n";
  throw std::domain_error("game fails validation with " + std::to_string(findings.size()) +
                          " finding(s)");
}

std::vector<double> parse_profile(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw IoError("bad number '" + item + "' in profile");
    }
  }
  if (out.empty()) throw IoError("empty profile");
  return out;
}

json equilibrium_json(const EquilibriumReport& e) {
  json j;
  j["kind"] = e.is_interval() ? "interval" : "point";
  if (e.is_interval()) {
    j["profile_lo"] = profile_json(e.profile);
    j["profile_hi"] = profile_json(e.profile_hi);
  } else {
    j["profile"] = profile_json(e.profile);
  }
  j["residual"] = num(e.residual);
  j["costs"] = profile_json(e.costs);
  j["epsilon"] = num(e.epsilon);
  return j;
}

struct CommonGameArgs {
  std::string game_path;
  double delta = -1.0;  // < 0 means keep the file's levels
  int samples = 50;

  Game load() const {
    Game g = load_game_file(game_path);
    if (delta >= 0.0) g = g.with_delta(delta);
    return g;
  }
};

int cmd_solve(const CommonGameArgs& common, const FindRoeOptions& opt,
              const std::string& verify_path, const std::string& out_path) {
  Game g = common.load();
  require_valid(g, common.samples);

  if (!verify_path.empty()) {
    json prior = json::parse(read_file(verify_path));
    json results = json::array();
    bool all_ok = true;
    for (const auto& e : prior.at("equilibria")) {
      std::vector<double> x;
      if (e.at("kind") == "interval") {
        const auto& lo = e.at("profile_lo");
        const auto& hi = e.at("profile_hi");
        for (std::size_t k = 0; k < lo.size(); ++k)
          x.push_back(0.5 * (lo[k].get<double>() + hi[k].get<double>()));
      } else {
        for (const auto& v : e.at("profile")) x.push_back(v.get<double>());
      }
      auto [ok, residual] = verify_roe(g, x, opt.tol);
      all_ok = all_ok && ok;
      json r;
      r["profile"] = profile_json(x);
      r["ok"] = ok;
      r["residual"] = num(residual);
      results.push_back(std::move(r));
    }
    json out;
    out["command"] = "verify";
    out["tol"] = num(opt.tol);
    out["results"] = std::move(results);
    write_output(out.dump(2), out_path);
    return all_ok ? kExitOk : kExitFindings;
  }

  FindRoeResult result = find_roe(g, opt);
  json out;
  out["command"] = "solve";
  out["players"] = g.players();
  out["delta"] = profile_json(g.deltas());
  out["count"] = result.equilibria.size();
  json eqs = json::array();
  for (const auto& e : result.equilibria) eqs.push_back(equilibrium_json(e));
  out["equilibria"] = std::move(eqs);
  for (int s : result.unconverged_starts)
    std::cerr << "note: search start " << s << " did not converge\n";
  write_output(out.dump(2), out_path);
  return kExitOk;
}

int cmd_sweep(const CommonGameArgs& common, double from, double to, int steps,
              const FindRoeOptions& opt, const std::string& out_path) {
  if (!(from >= 0.0 && to <= 1.0 && from <= to) || steps < 1)
    throw IoError("bad sweep range: need 0 <= from <= to <= 1 and steps >= 1");
  Game g = common.load();
  require_valid(g, common.samples);
  std::vector<double> deltas;
  for (int k = 0; k < steps; ++k)
    deltas.push_back(steps == 1 ? from : from + (to - from) * k / (steps - 1));
  auto levels = sweep_delta(g, deltas, opt);
  std::string csv = "delta,eq_index,player,action\n";
  for (const auto& [d, result] : levels) {
    int index = 0;
    for (const auto& e : result.equilibria) {
      std::vector<const std::vector<double>*> profiles;
      profiles.push_back(&e.profile);
      if (e.is_interval()) profiles.push_back(&e.profile_hi);
      for (const auto* p : profiles) {
        for (int i = 0; i < g.players(); ++i)
          csv += fmt9(d) + "," + std::to_string(index) + "," + std::to_string(i + 1) + "," +
                 fmt9((*p)[static_cast<std::size_t>(i)]) + "\n";
        ++index;
      }
    }
  }
  write_output(csv, out_path);
  return kExitOk;
}

json path_json(const PathReport& path) {
  json out;
  out["status"] = path.status == PathReport::Status::reached_zero ? "reached-zero" : "broken";
  if (path.status == PathReport::Status::broken) out["break_delta"] = num(path.break_delta);
  out["counterpart"] = path.counterpart;
  out["step"] = num(path.step);
  out["jump_tol"] = num(path.jump_tol);
  json steps = json::array();
  for (const auto& s : path.steps) {
    json js;
    js["delta"] = num(s.delta);
    js["profile"] = profile_json(s.profile);
    js["residual"] = num(s.residual);
    js["epsilon"] = num(s.epsilon);
    steps.push_back(std::move(js));
  }
  out["steps"] = std::move(steps);
  return out;
}

int cmd_trace(const CommonGameArgs& common, const std::string& profile_text, double start_delta,
              const TraceOptions& opt, const std::string& out_path) {
  Game g = common.load();
  require_valid(g, common.samples);
  std::vector<double> start = parse_profile(profile_text);
  PathReport path = trace_equilibrium(g, start, start_delta, opt);
  json out;
  out["command"] = "trace";
  out["start_delta"] = num(start_delta);
  out.update(path_json(path));
  write_output(out.dump(2), out_path);
  return kExitOk;
}

int cmd_cost(const CommonGameArgs& common, int player, const std::string& opp_text,
             bool trace_mode, const std::string& profile_text, double start_delta,
             const TraceOptions& topt, const std::string& out_path) {
  Game g = common.load();
  require_valid(g, common.samples);
  if (trace_mode) {
    std::vector<double> start = parse_profile(profile_text);
    PathReport path = trace_equilibrium(g, start, start_delta, topt);
    auto curve = cost_continuity_probe(g, path);
    std::string csv = "delta,epsilon\n";
    for (const auto& [d, eps] : curve) csv += fmt9(d) + "," + fmt9(eps) + "\n";
    write_output(csv, out_path);
    return kExitOk;
  }
  if (player < 1 || player > g.players()) throw IoError("player index out of range");
  std::vector<double> opp = parse_profile(opp_text);
  if (static_cast<int>(opp.size()) != g.players() - 1)
    throw IoError("opponent profile needs players-1 entries");
  json out;
  out["command"] = "cost";
  out["player"] = player;
  out["opponents"] = profile_json(opp);
  out["delta"] = num(g.delta(player - 1));
  out["cost"] = num(opportunity_cost(g, player - 1, opp));
  out["upper_bound"] = num(cost_upper_bound(g, player - 1, opp));
  write_output(out.dump(2), out_path);
  return kExitOk;
}

int cmd_embed(const CommonGameArgs& common, const std::string& profile_text, double eps, double H,
              const std::string& out_path) {
  Game g = common.load();
  std::vector<double> x = parse_profile(profile_text);
  EmbeddingCertificate cert = embed_epsilon_nash(g, x, eps, H);
  json out;
  out["command"] = "embed";
  out["anchor"] = profile_json(cert.anchor);
  out["eps"] = num(cert.eps);
  out["H"] = num(cert.H);
  out["delta"] = num(cert.delta);
  out["verification_residual"] = num(cert.verification_residual);
  write_output(out.dump(2), out_path);
  return kExitOk;
}

int cmd_frontier(const CommonGameArgs& common, int player, int resolution, int max_profiles,
                 const std::string& out_path) {
  Game g = common.load();
  require_valid(g, common.samples);
  if (player < 1 || player > g.players()) throw IoError("player index out of range");
  FrontierReport report = worst_case_frontier(g, player - 1, resolution);
  json out;
  out["command"] = "frontier";
  out["player"] = player;
  out["resolution"] = resolution;
  json verts = json::array();
  for (std::size_t v = 0; v < report.vertices.size(); ++v) {
    const auto& fv = report.vertices[v];
    json jv;
    jv["vertex"] = v;
    jv["active"] = fv.active;
    jv["active_profile_count"] = fv.profiles.size();
    json ps = json::array();
    for (std::size_t k = 0; k < fv.profiles.size() && k < static_cast<std::size_t>(max_profiles);
         ++k)
      ps.push_back(profile_json(fv.profiles[k]));
    jv["profiles"] = std::move(ps);
    jv["profiles_truncated"] = fv.profiles.size() > static_cast<std::size_t>(max_profiles);
    verts.push_back(std::move(jv));
  }
  out["vertices"] = std::move(verts);
  write_output(out.dump(2), out_path);
  return kExitOk;
}

int cmd_validate(const CommonGameArgs& common, const std::string& out_path) {
  Game g = common.load();
  auto findings = validate_assumptions(g, common.samples);
  json out;
  out["command"] = "validate";
  out["samples"] = common.samples;
  json arr = json::array();
  for (const auto& f : findings) {
    json jf;
    jf["severity"] = f.severity == Finding::Severity::error ? "error" : "warning";
    jf["player"] = f.player;
    jf["code"] = f.code;
    jf["message"] = f.message;
    arr.push_back(std::move(jf));
  }
  out["findings"] = std::move(arr);
  out["strictly_concave"] = payoff_strictly_concave(g, common.samples);
  write_output(out.dump(2), out_path);
  return findings.empty() ? kExitOk : kExitFindings;
}

int cmd_cournot(const std::string& sub, const CournotParams& params, double q, double qi,
                double qopp, const std::string& out_path) {
  json out;
  out["command"] = "cournot " + sub;
  if (sub == "thresholds") {
    Thresholds t = thresholds(params);
    out["q_lo"] = num(t.q_lo);
    out["q_hi"] = num(t.q_hi);
    out["q_m"] = num(t.q_m);
  } else if (sub == "reaction") {
    out["q_opp"] = num(q);
    out["reaction"] = num(robust_reaction(params, q));
  } else if (sub == "nash") {
    auto [q1, q2] = nominal_nash(params);
    out["profile"] = profile_json({q1, q2});
  } else if (sub == "delta-star") {
    DeltaStar ds = delta_star(params);
    out["delta_star"] = num(ds.value);
    out["interior"] = ds.interior;
    if (!ds.interior) out["note"] = "no interior threshold";
  } else if (sub == "roe-set") {
    CournotRoeSet set = roe_set(params);
    out["case"] = to_string(set.label);
    json pts = json::array();
    for (const auto& p : set.points) pts.push_back(profile_json({p[0], p[1]}));
    out["points"] = std::move(pts);
    if (set.has_segment) {
      out["segment_lo"] = profile_json({set.segment_lo[0], set.segment_lo[1]});
      out["segment_hi"] = profile_json({set.segment_hi[0], set.segment_hi[1]});
    }
  } else if (sub == "profit") {
    out["q_i"] = num(qi);
    out["q_opp"] = num(qopp);
    out["worst_case_profit"] = num(worst_case_profit(params, qi, qopp));
  }
  write_output(out.dump(2), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robusteq: equilibria of games with uncertain payoffs"};
  app.require_subcommand(1);

  CommonGameArgs common;
  FindRoeOptions fopt;
  TraceOptions topt;
  std::string out_path, verify_path, profile_text, opp_text;
  double from = 0.0, to = 1.0, eps = 0.0, H = 1.0, q = 0.0, qi = 0.0, qopp = 0.0;
  double start_delta = 1.0;
  int steps = 11, player = 1, resolution = 101, max_profiles = 100;
  bool cost_trace = false;

  auto add_game_options = [&](CLI::App* cmd, bool with_delta = true) {
    cmd->add_option("game", common.game_path, "game file (JSON)")->required();
    if (with_delta)
      cmd->add_option("--delta", common.delta, "override every player's uncertainty level");
    cmd->add_option("--samples", common.samples, "validation grid size");
    cmd->add_option("--out", out_path, "output file (default stdout)");
  };

  CLI::App* solve = app.add_subcommand("solve", "enumerate equilibria");
  add_game_options(solve);
  solve->add_option("--grid", fopt.grid, "scan resolution");
  solve->add_option("--tol", fopt.tol, "residual tolerance");
  solve->add_option("--dedupe", fopt.dedupe, "dedupe radius");
  solve->add_option("--verify", verify_path, "verify profiles from a prior report");

  CLI::App* sweep = app.add_subcommand("sweep", "equilibria across uncertainty levels");
  add_game_options(sweep, false);
  sweep->add_option("--from", from, "lowest level")->required();
  sweep->add_option("--to", to, "highest level")->required();
  sweep->add_option("--steps", steps, "number of levels")->required();
  sweep->add_option("--grid", fopt.grid, "scan resolution");
  sweep->add_option("--tol", fopt.tol, "residual tolerance");

  CLI::App* trace = app.add_subcommand("trace", "follow one equilibrium as the level shrinks");
  add_game_options(trace, false);
  trace->add_option("--profile", profile_text, "starting profile x1,x2,...")->required();
  trace->add_option("--delta", start_delta, "starting level")->required();
  trace->add_option("--step", topt.step, "level decrement");
  trace->add_option("--jump-tol", topt.jump_tol, "largest profile jump per step");
  trace->add_option("--tol", topt.tol, "residual tolerance");

  CLI::App* cost = app.add_subcommand("cost", "opportunity cost of uncertainty");
  add_game_options(cost);
  cost->add_option("--player", player, "player index (1-based)");
  cost->add_option("--opp", opp_text, "opponent actions, comma separated");
  cost->add_flag("--trace", cost_trace, "emit the (delta, epsilon) curve along a path");
  cost->add_option("--profile", profile_text, "starting profile for --trace");
  cost->add_option("--start-delta", start_delta, "starting level for --trace");
  cost->add_option("--step", topt.step, "level decrement for --trace");
  cost->add_option("--jump-tol", topt.jump_tol, "jump tolerance for --trace");

  CLI::App* embed = app.add_subcommand("embed", "realize an approximate equilibrium as exact");
  add_game_options(embed, false);
  embed->add_option("--profile", profile_text, "anchor profile")->required();
  embed->add_option("--eps", eps, "approximation level")->required();
  embed->add_option("--H", H, "uncertainty interval height")->required();

  CLI::App* frontier = app.add_subcommand("frontier", "worst-case frontier of a player");
  add_game_options(frontier);
  frontier->add_option("--player", player, "player index (1-based)")->required();
  frontier->add_option("--resolution", resolution, "grid points per player");
  frontier->add_option("--max-profiles", max_profiles, "profiles listed per vertex");

  CLI::App* validate_cmd = app.add_subcommand("validate", "check regularity hypotheses");
  add_game_options(validate_cmd, false);

  CLI::App* cournot = app.add_subcommand("cournot", "duopoly closed forms");
  cournot->require_subcommand(1);
  CournotParams params;
  std::vector<CLI::App*> cournot_subs;
  for (const char* name : {"thresholds", "reaction", "nash", "delta-star", "roe-set", "profit"}) {
    CLI::App* sub = cournot->add_subcommand(name);
    sub->add_option("--a", params.a)->required();
    sub->add_option("--bhat", params.b_hat)->required();
    sub->add_option("--ghat", params.gamma_hat)->required();
    sub->add_option("--blo", params.b_lo)->required();
    sub->add_option("--bhi", params.b_hi)->required();
    sub->add_option("--glo", params.gamma_lo)->required();
    sub->add_option("--ghi", params.gamma_hi)->required();
    sub->add_option("--delta", params.delta)->required();
    sub->add_option("--out", out_path);
    cournot_subs.push_back(sub);
  }
  cournot_subs[1]->add_option("--q", q, "opponent output")->required();
  cournot_subs[5]->add_option("--qi", qi, "own output")->required();
  cournot_subs[5]->add_option("--qopp", qopp, "opponent output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (solve->parsed()) return cmd_solve(common, fopt, verify_path, out_path);
    if (sweep->parsed()) return cmd_sweep(common, from, to, steps, fopt, out_path);
    if (trace->parsed()) return cmd_trace(common, profile_text, start_delta, topt, out_path);
    if (cost->parsed())
      return cmd_cost(common, player, opp_text, cost_trace, profile_text, start_delta, topt,
                      out_path);
    if (embed->parsed()) return cmd_embed(common, profile_text, eps, H, out_path);
    if (frontier->parsed())
      return cmd_frontier(common, player, resolution, max_profiles, out_path);
    if (validate_cmd->parsed()) return cmd_validate(common, out_path);
    if (cournot->parsed()) {
      for (auto* sub : cournot_subs)
        if (sub->parsed()) return cmd_cournot(sub->get_name(), params, q, qi, qopp, out_path);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const GameFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFindings;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFindings;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}
