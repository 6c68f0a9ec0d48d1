#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "refdet/harness.hpp"

namespace {

void emit(const refdet::OrderedJson& j, const std::string& report_path) {
    std::string text = j.dump(2);
    text += "\n";
    if (report_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(report_path, std::ios::binary);
        out << text;
    }
}

refdet::OrderedJson enumerate_json(const std::string& kind, int vertices, int edges,
                                   bool count_only) {
    using namespace refdet;
    OrderedJson j;
    j["kind"] = kind;
    j["vertices"] = vertices;
    if (kind == "doombs") {
        j["edges"] = edges;
        auto all = enumerate_doombs(vertices, edges);
        j["count"] = all.size();
        if (!count_only) {
            OrderedJson list = OrderedJson::array();
            for (const auto& d : all) {
                OrderedJson item = OrderedJson::array();
                for (const auto& [p, q] : d.edges) item.push_back({p, q});
                list.push_back(item);
            }
            j["structures"] = list;
        }
        return j;
    }
    if (kind == "trees") {
        auto all = enumerate_trees(vertices);
        j["count"] = all.size();
        if (!count_only) {
            OrderedJson list = OrderedJson::array();
            for (const auto& t : all) {
                OrderedJson item = OrderedJson::array();
                for (const auto& [a, b] : t) item.push_back({a, b});
                list.push_back(item);
            }
            j["structures"] = list;
        }
        return j;
    }
    if (kind == "3trees") {
        int m = edges;
        j["edges"] = m;
        auto all = enumerate_3trees(m, vertices);
        j["count"] = all.size();
        if (!count_only) {
            OrderedJson list = OrderedJson::array();
            for (const auto& t : all) {
                OrderedJson item = OrderedJson::array();
                for (const auto& tri : t.triangles) item.push_back({tri[0], tri[1], tri[2]});
                list.push_back(item);
            }
            j["structures"] = list;
        }
        return j;
    }
    if (kind == "bbasic") {
        auto all = enumerate_bbasic(vertices);
        j["count"] = all.size();
        if (!count_only) {
            OrderedJson list = OrderedJson::array();
            for (const auto& g : all) {
                OrderedJson item;
                OrderedJson minus = OrderedJson::array(), plus = OrderedJson::array();
                for (const auto& [a, b] : g.minus_edges) minus.push_back({a, b});
                for (const auto& [a, b] : g.plus_edges) plus.push_back({a, b});
                item["minus_edges"] = minus;
                item["plus_edges"] = plus;
                item["loops"] = g.loops;
                list.push_back(item);
            }
            j["structures"] = list;
        }
        return j;
    }
    throw refdet::FileFormatError("unknown enumeration kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification of reflection-group determinant and Pfaffian identities"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "verify one identity and report");
    refdet::VerifyParams params;
    std::string report_path;
    verify->add_option("identity", params.identity,
                       "gendet|k1|keven-pf|matrix-tree|mv|bn-tree")
        ->required();
    verify->add_option("--family", params.family, "an:<n>|bn:<n>|dn:<n>|file:<path>|random:<d>x<N>");
    verify->add_option("--k", params.k, "commutator depth");
    verify->add_option("--weights", params.weights, "symbolic|symbolic-full|unit|random");
    verify->add_option("--seed", params.seed, "random seed");
    verify->add_option("--bound", params.bound, "random weight denominator bound");
    verify->add_option("--mode", params.mode, "exact|float");
    verify->add_option("--tol", params.tol, "float-mode relative tolerance");
    verify->add_option("--report", report_path, "write the JSON report here");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "measure the scalar between both sides");
    std::string cal_identity, cal_range = "n=1..3", cal_report;
    calibrate->add_option("identity", cal_identity, "identity name")->required();
    calibrate->add_option("--range", cal_range, "parameter range, e.g. n=1..4 or m=1..2");
    calibrate->add_option("--report", cal_report, "write the JSON report here");

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "list combinatorial structures");
    std::string enum_kind;
    int vertices = 3, edges = 0;
    bool count_only = false;
    enumerate->add_option("kind", enum_kind, "doombs|trees|3trees|bbasic")->required();
    enumerate->add_option("--vertices", vertices, "vertex count");
    enumerate->add_option("--edges", edges, "edge count (doombs) or triangle count (3trees)");
    enumerate->add_flag("--count-only", count_only, "print only the count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) {
            refdet::VerificationReport rep = refdet::verify_identity(params);
            emit(rep.to_json(), report_path);
            return rep.equal ? 0 : 1;
        }
        if (calibrate->parsed()) {
            auto eq = cal_range.find('=');
            auto dots = cal_range.find("..");
            if (eq == std::string::npos || dots == std::string::npos)
                throw refdet::FileFormatError("range must look like n=1..4");
            int lo = std::stoi(cal_range.substr(eq + 1, dots - eq - 1));
            int hi = std::stoi(cal_range.substr(dots + 2));
            refdet::CalibrationReport rep = refdet::calibrate_constants(cal_identity, lo, hi);
            emit(rep.to_json(), cal_report);
            return rep.constant == "non-constant" ? 1 : 0;
        }
        if (enumerate->parsed()) {
            emit(enumerate_json(enum_kind, vertices, edges, count_only), "");
            return 0;
        }
    } catch (const refdet::ScaleLimitError& e) {
        std::cerr << "scale error: " << e.what() << "\n";
        return 2;
    } catch (const refdet::FileFormatError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
