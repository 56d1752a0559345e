#include "barrier_comp/barrier_comp.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bc = barrier_comp;

namespace {

bc::Vec parse_vector(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    bc::Vec v(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
}

// Workspace box: the states of interest plus padding around leaf geometry.
void default_box(const bc::Scenario& sc, bc::Vec& lo, bc::Vec& hi) {
    lo = bc::Vec::Constant(2, 1e30);
    hi = bc::Vec::Constant(2, -1e30);
    auto grow = [&](const bc::Vec& p, double pad) {
        for (int d = 0; d < 2; ++d) {
            lo[d] = std::min(lo[d], p[d] - pad);
            hi[d] = std::max(hi[d], p[d] + pad);
        }
    };
    for (const bc::LeafSpec& leaf : sc.layered.leaves) {
        if (const auto* hs = std::get_if<bc::HalfSpace>(&leaf.primitive)) grow(hs->anchor, 1.0);
        if (const auto* c = std::get_if<bc::Circle>(&leaf.primitive)) grow(c->center, c->radius + 1.0);
    }
    for (const bc::Vec& x0 : sc.initial_states) grow(x0, 0.5);
    if (sc.controller.kind == bc::DesiredController::Kind::Proportional)
        grow(sc.controller.target, 0.5);
}

std::optional<bc::Vec> scenario_target(const bc::Scenario& sc) {
    if (sc.controller.kind == bc::DesiredController::Kind::Proportional)
        return sc.controller.target;
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boolean-composed control barrier functions: evaluation, safety "
                 "filtering, feasibility checks and closed-loop simulation"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global options after the subcommand name

    std::string scenario_path;
    std::string out_dir;
    std::string x_arg, u_des_arg, box_arg, kappas_arg = "2,20,200";
    int resolution = 200;
    std::optional<uint64_t> seed;

    app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
    app.add_option("--out", out_dir, "output directory (default: scenario's output.dir)");
    app.add_option("--seed", seed, "seed echoed into output headers");

    auto* cmd_eval = app.add_subcommand("eval", "evaluate h, gradient and weights at a state");
    cmd_eval->add_option("--x", x_arg, "state, comma separated")->required();

    auto* cmd_grid = app.add_subcommand("grid", "membership grid and level-set figure");
    cmd_grid->add_option("--box", box_arg, "x_lo,x_hi,y_lo,y_hi (default: auto)");
    cmd_grid->add_option("--res", resolution, "grid resolution per axis");

    auto* cmd_filter = app.add_subcommand("filter", "explicit safety filter at a state");
    cmd_filter->add_option("--x", x_arg, "state")->required();
    cmd_filter->add_option("--u-des", u_des_arg, "desired input (default: scenario controller)");

    auto* cmd_feas = app.add_subcommand("feas", "per-leaf QP feasibility at a state");
    cmd_feas->add_option("--x", x_arg, "state")->required();
    cmd_feas->add_option("--u-des", u_des_arg, "desired input (unused, accepted for symmetry)");

    auto* cmd_simulate = app.add_subcommand("simulate", "closed-loop simulation");
    auto* cmd_sweep = app.add_subcommand("sweep", "simulate across smoothing parameters");
    cmd_sweep->add_option("--kappas", kappas_arg, "comma-separated kappa values");

    CLI11_PARSE(app, argc, argv);

    try {
        const bc::Scenario sc = bc::parse_scenario(scenario_path);
        const bc::CompositionParams params = sc.composition_params();
        const std::filesystem::path out =
            out_dir.empty() ? std::filesystem::path(sc.output_dir) : std::filesystem::path(out_dir);
        std::filesystem::create_directories(out);

        if (cmd_eval->parsed()) {
            const bc::Vec x = parse_vector(x_arg);
            const bc::BarrierEval eval = bc::smooth_eval(sc.layered, params, x);
            const bc::OracleEval oracle = bc::nonsmooth_eval(sc.layered, x);
            std::ofstream csv(out / "eval.csv");
            if (seed) csv << "# seed=" << *seed << "\n";
            csv << "h,h_c";
            for (int d = 0; d < x.size(); ++d) csv << ",grad" << (d + 1);
            for (size_t i = 0; i < eval.leaf_weights.size(); ++i) csv << ",lambda" << (i + 1);
            csv << "\n" << eval.value << "," << oracle.value;
            for (int d = 0; d < x.size(); ++d) csv << "," << eval.gradient[d];
            for (double w : eval.leaf_weights) csv << "," << w;
            csv << "\n";
            std::cout << "h = " << eval.value << "\nh_c = " << oracle.value
                      << "\ngrad = " << eval.gradient.transpose() << "\n";
        } else if (cmd_grid->parsed()) {
            bc::Vec lo, hi;
            if (box_arg.empty()) {
                default_box(sc, lo, hi);
            } else {
                const auto b = parse_list(box_arg);
                if (b.size() != 4) throw bc::ParseError("--box expects x_lo,x_hi,y_lo,y_hi");
                lo = bc::Vec{{b[0], b[2]}};
                hi = bc::Vec{{b[1], b[3]}};
            }
            const bc::MembershipGrid grid =
                bc::membership_grid(sc.layered, params, lo, hi, resolution);
            bc::write_grid_csv((out / "grid.csv").string(), grid, seed);
            if (sc.emit_svg) bc::write_grid_svg((out / "grid.svg").string(), grid, sc.layered);
            std::cout << "cells=" << grid.total_cells
                      << " smooth_in_exact_out=" << grid.count_smooth_in_exact_out
                      << " exact_in_smooth_out=" << grid.count_exact_in_smooth_out << "\n";
        } else if (cmd_filter->parsed()) {
            const bc::Vec x = parse_vector(x_arg);
            const bc::Vec u_des = u_des_arg.empty() ? sc.controller(x) : parse_vector(u_des_arg);
            const bc::BarrierEval eval = bc::smooth_eval(sc.layered, params, x);
            const bc::FilterResult fr =
                bc::filter_explicit(sc.dynamics, eval, sc.alpha, u_des, x);
            std::ofstream csv(out / "filter.csv");
            if (seed) csv << "# seed=" << *seed << "\n";
            csv << "h,eta,case";
            for (int d = 0; d < u_des.size(); ++d) csv << ",u_safe" << (d + 1);
            csv << "\n" << fr.h_value << "," << fr.eta << ","
                << (fr.kase == bc::FilterResult::Case::Active ? "active"
                    : fr.kase == bc::FilterResult::Case::Inactive ? "inactive" : "passthrough");
            for (int d = 0; d < fr.u_safe.size(); ++d) csv << "," << fr.u_safe[d];
            csv << "\n";
            std::cout << "u_safe = " << fr.u_safe.transpose() << " (eta = " << fr.eta << ")\n";
        } else if (cmd_feas->parsed()) {
            const bc::Vec x = parse_vector(x_arg);
            const std::vector<bc::LeafEval> leaves = bc::leaf_eval(sc.layered, x);
            std::vector<bc::LieDerivatives> lies;
            std::vector<double> h_values;
            std::vector<bc::AlphaFn> alphas(leaves.size(), sc.alpha);
            for (const bc::LeafEval& e : leaves) {
                lies.push_back(bc::lie_derivatives(sc.dynamics, e.gradient, x));
                h_values.push_back(e.value);
            }
            const bc::FeasibilityReport rep = bc::feasibility_check(lies, h_values, alphas);
            if (rep.feasible) {
                std::cout << "feasible, witness u = " << rep.witness_u->transpose() << "\n";
            } else {
                std::cout << "infeasible, Farkas multipliers = "
                          << rep.violating_multipliers->transpose() << "\n";
                return 2;
            }
        } else if (cmd_simulate->parsed()) {
            bc::Vec lo, hi;
            default_box(sc, lo, hi);
            for (size_t i = 0; i < sc.initial_states.size(); ++i) {
                const bc::Trajectory traj = bc::simulate(sc, sc.initial_states[i]);
                const std::string stem = "trajectory_" + std::to_string(i);
                bc::write_trajectory_csv((out / (stem + ".csv")).string(), traj, seed);
                if (sc.emit_svg && sc.dynamics_dim == 2)
                    bc::write_trajectory_svg((out / (stem + ".svg")).string(), traj, sc.layered,
                                             lo, hi, scenario_target(sc));
                std::cout << stem << ": min h = " << traj.min_h()
                          << (traj.complete ? "" : " (aborted on non-finite state)") << "\n";
                if (!traj.complete) return 3;
            }
        } else if (cmd_sweep->parsed()) {
            const std::vector<double> kappas = parse_list(kappas_arg);
            const auto sweep = bc::kappa_sweep(sc, kappas);
            std::ofstream csv(out / "sweep.csv");
            if (seed) csv << "# seed=" << *seed << "\n";
            csv << "kappa,max_input_jump,min_h\n";
            for (size_t i = 0; i < sweep.size(); ++i) {
                const auto& e = sweep[i];
                csv << e.kappa << "," << e.max_input_jump << "," << e.trajectory.min_h() << "\n";
                bc::write_trajectory_csv(
                    (out / ("sweep_" + std::to_string(i) + ".csv")).string(), e.trajectory, seed);
                if (!e.trajectory.complete) return 3;
            }
            std::cout << "sweep written for " << sweep.size() << " kappa values\n";
        }
        return 0;
    } catch (const bc::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const bc::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
