// Command-line front-end: scene integration (area), coarea checks,
// curve-limit studies, and Riemann-net convergence tables.
//
// Exit codes are a stable contract:
//   0  success (coarea: rel_err within --max-rel-err)
//   1  parse or validation error (message on stderr)
//   2  numerical non-convergence
//   3  coarea relative error above --max-rel-err
//   4  coarea excluded-slice budget breached
// Reports go to stdout; stderr never carries report data.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmt/coarea.hpp"
#include "gmt/expr.hpp"
#include "gmt/measures.hpp"
#include "gmt/nets.hpp"
#include "gmt/report_io.hpp"
#include "gmt/scene.hpp"
#include "gmt/study.hpp"
#include "gmt/system_json.hpp"

namespace {

std::uint64_t seed_from_env() {
    const char* s = std::getenv("GMT_SEED");
    if (!s) return 0x5eedULL;
    return std::strtoull(s, nullptr, 10);
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    out << content;
    return true;
}

struct AreaArgs {
    std::string scene_path;
    std::string field = "1";
    double tol = 1e-8;
    std::string json_out;
    int threads = 1;
};

int run_area(const AreaArgs& args) {
    gmt::Scene scene;
    gmt::Expression field;
    try {
        scene = gmt::Scene::from_file(args.scene_path);
        field = gmt::parse(args.field, scene.ambient_dim, "x");
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (const auto witness = gmt::check_essentially_disjoint(scene.manifold, seed_from_env()))
        std::cerr << "warning: charts " << witness->chart_a << " and " << witness->chart_b
                  << " have image points within " << gmt::kOverlapDistance
                  << " at distinct parameters; images may not be essentially disjoint\n";

    gmt::HausdorffResult result;
    try {
        gmt::HausdorffOptions opt;
        opt.threads = args.threads;
        result = gmt::hausdorff_integrate(field, scene.manifold, args.tol, opt);
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string report = gmt::area_report_json(result, args.tol);
    std::cout << report;
    if (!args.json_out.empty() && !write_file(args.json_out, report)) return 1;
    return 0;
}

struct CoareaArgs {
    std::string h;
    std::string f = "1";
    double a = 0.0;
    double b = 0.0;
    int dim = 2;
    int res = 256;
    int slices = 64;
    std::vector<double> box;
    double max_rel_err = 0.02;
    std::string json_out;
    std::string csv_out;
    int threads = 1;
};

int run_coarea(const CoareaArgs& args) {
    gmt::ImplicitField h;
    gmt::Expression f;
    gmt::GridSpec grid;
    try {
        if (args.dim != 2 && args.dim != 3)
            throw gmt::InvariantError("--dim must be 2 or 3");
        if (!(args.a < args.b)) throw gmt::InvariantError("--a must be less than --b");
        h = gmt::ImplicitField::make(gmt::parse(args.h, args.dim, "x"));
        f = gmt::parse(args.f, args.dim, "x");
        if (h.h.uses_function(gmt::FuncId::Abs))
            std::cerr << "warning: H uses abs and may not be smooth; near-kink slices "
                         "will be excluded by the gradient tolerance\n";
        std::vector<double> box = args.box;
        if (box.empty())
            for (int k = 0; k < args.dim; ++k) {
                box.push_back(-3.0);
                box.push_back(3.0);
            }
        if (static_cast<int>(box.size()) != 2 * args.dim)
            throw gmt::InvariantError("--box needs lo,hi per axis");
        for (int k = 0; k < args.dim; ++k) {
            grid.box.push_back({box[static_cast<std::size_t>(2 * k)],
                                box[static_cast<std::size_t>(2 * k + 1)]});
            grid.resolution.push_back(args.res);
        }
        grid.validate();
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    gmt::CoareaReport report;
    try {
        gmt::CoareaOptions opt;
        opt.threads = args.threads;
        report = gmt::coarea_check(f, h, args.a, args.b, grid, args.slices, opt);
    } catch (const gmt::ExcludedSliceBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const gmt::InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string json = gmt::coarea_report_json(report);
    std::cout << json;
    if (!args.json_out.empty() && !write_file(args.json_out, json)) return 1;
    if (!args.csv_out.empty() && !write_file(args.csv_out, gmt::coarea_slices_csv(report)))
        return 1;
    if (report.rel_err > args.max_rel_err) {
        std::cerr << "coarea relative error " << report.rel_err << " exceeds "
                  << args.max_rel_err << "\n";
        return 3;
    }
    return 0;
}

struct StudyArgs {
    std::string family_path;
    std::string field = "1";
    int k_max = 10;
    double tol = 1e-8;
    std::string json_out;
    std::string csv_out;
    int threads = 1;
};

int run_limit_study(const StudyArgs& args) {
    gmt::CurveFamily family;
    gmt::Expression field;
    try {
        family = gmt::CurveFamily::from_file(args.family_path);
        field = gmt::parse(args.field, family.ambient_dim, "x");
        if (args.k_max < 2) throw gmt::InvariantError("--k-max must be at least 2");
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    gmt::LimitStudyResult result;
    try {
        gmt::HausdorffOptions opt;
        opt.threads = args.threads;
        result = gmt::run_limit_study(family, field, args.k_max, args.tol, opt);
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string json = gmt::limit_study_json(result);
    std::cout << json;
    if (!args.json_out.empty() && !write_file(args.json_out, json)) return 1;
    if (!args.csv_out.empty() && !write_file(args.csv_out, gmt::limit_study_csv(result)))
        return 1;
    return 0;
}

struct NetArgs {
    std::string f;
    double a = 0.0;
    double b = 1.0;
    double tol = 1e-10;
    int max_steps = 40;
    std::string csv_out;
};

int run_net(const NetArgs& args) {
    gmt::Expression f;
    gmt::RefinementNet net;
    try {
        if (!(args.a < args.b)) throw gmt::InvariantError("--a must be less than --b");
        f = gmt::parse(args.f, 1, "x");
        net.initial = gmt::uniform_partition(args.a, args.b, 1);
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const gmt::NetLimit limit = gmt::net_limit(net, f, args.tol, args.max_steps);
        const std::string csv = gmt::convergence_csv(limit.report);
        std::cout << csv;
        if (!args.csv_out.empty() && !write_file(args.csv_out, csv)) return 1;
        return 0;
    } catch (const gmt::NetConvergenceError& e) {
        // Emit the partial table so the stall can be diagnosed.
        std::cout << gmt::convergence_csv(e.report());
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gmt — chart-based Hausdorff measures, area and coarea checks"};
    app.require_subcommand(1);
    // --h is a real option of the coarea subcommand, so help lives on
    // --help alone
    app.set_help_flag("--help", "Print this help message and exit");

    AreaArgs area_args;
    auto* area = app.add_subcommand("area", "Integrate a field over a scene's charts");
    area->add_option("--scene", area_args.scene_path, "Scene JSON file")->required();
    area->add_option("--field", area_args.field, "Field expression over x1..xn");
    area->add_option("--tol", area_args.tol, "Absolute tolerance");
    area->add_option("--json-out", area_args.json_out, "Also write the JSON report here");
    area->add_option("--threads", area_args.threads, "Worker threads (0 = auto)");

    CoareaArgs coarea_args;
    auto* coarea = app.add_subcommand("coarea", "Verify the coarea identity for H and f");
    coarea->set_help_flag("--help", "Print this help message and exit");
    coarea->add_option("--h", coarea_args.h, "Implicit function H over x1..xn")->required();
    coarea->add_option("--f", coarea_args.f, "Integrand expression");
    coarea->add_option("--a", coarea_args.a, "Lower level")->required();
    coarea->add_option("--b", coarea_args.b, "Upper level")->required();
    coarea->add_option("--dim", coarea_args.dim, "Ambient dimension (2 or 3)");
    coarea->add_option("--res", coarea_args.res, "Grid cells per axis");
    coarea->add_option("--slices", coarea_args.slices, "Outer integral panels");
    coarea->add_option("--box", coarea_args.box, "Grid box lo,hi per axis")->delimiter(',');
    coarea->add_option("--max-rel-err", coarea_args.max_rel_err,
                       "Exit 3 when rel_err exceeds this");
    coarea->add_option("--json-out", coarea_args.json_out, "Also write the JSON report here");
    coarea->add_option("--csv-out", coarea_args.csv_out, "Write the per-slice CSV here");
    coarea->add_option("--threads", coarea_args.threads, "Worker threads (0 = auto)");

    StudyArgs study_args;
    auto* study = app.add_subcommand("limit-study", "Chart-family convergence study");
    study->add_option("--family", study_args.family_path, "Family JSON file")->required();
    study->add_option("--field", study_args.field, "Field expression over x1..xn");
    study->add_option("--k-max", study_args.k_max, "Largest family parameter")->required();
    study->add_option("--tol", study_args.tol, "Per-integral absolute tolerance");
    study->add_option("--json-out", study_args.json_out, "Also write the JSON summary here");
    study->add_option("--csv-out", study_args.csv_out, "Write the k,integral,gap CSV here");
    study->add_option("--threads", study_args.threads, "Worker threads (0 = auto)");

    NetArgs net_args;
    auto* net = app.add_subcommand("net", "Riemann-sum net convergence table");
    net->add_option("--f", net_args.f, "Integrand over x1")->required();
    net->add_option("--a", net_args.a, "Interval start")->required();
    net->add_option("--b", net_args.b, "Interval end")->required();
    net->add_option("--tol", net_args.tol, "Successive-difference tolerance");
    net->add_option("--max-steps", net_args.max_steps, "Refinement budget");
    net->add_option("--csv-out", net_args.csv_out, "Write the convergence CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (area->parsed()) return run_area(area_args);
    if (coarea->parsed()) return run_coarea(coarea_args);
    if (study->parsed()) return run_limit_study(study_args);
    if (net->parsed()) return run_net(net_args);
    return 1;
}
