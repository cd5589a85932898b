#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "qbounds/errors.hpp"
#include "qbounds/report.hpp"
#include "qbounds/selftest.hpp"

using namespace qbounds;

namespace {

BuiltinSpec hb(int photons, double eta) {
    BuiltinSpec s;
    s.photons = photons;
    s.eta = eta;
    return s;
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path.string();
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no exception";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Report, HollandBurnettPanel) {
    const BuiltinSpec s = hb(2, 0.7);
    const BoundsReport r = compute_bounds(build_builtin(s), describe(s), parse_povm_choice("sld:0"));
    ASSERT_TRUE(r.ok()) << r.message;
    EXPECT_NEAR(*r.C_H, 0.672531947194419, 1e-7);
    EXPECT_NEAR(*r.C_S, 0.590102040816326, 1e-12);
    EXPECT_NEAR(*r.C_R, 0.617142857142857, 1e-12);
    ASSERT_TRUE(r.C_classical.has_value());
    EXPECT_GE(*r.C_classical, *r.C_H * (1.0 - 1e-7));
    EXPECT_NEAR(*r.reldiff_sld(), 1.0 - *r.C_S / *r.C_H, 1e-15);
    ASSERT_EQ(r.D.rows(), 2);
    EXPECT_EQ(r.D(0, 1), -r.D(1, 0));
    EXPECT_NEAR(*r.D_fro, r.D.norm(), 1e-15);

    const auto j = nlohmann::json::parse(bounds_report_json(r));
    EXPECT_EQ(j["status"], "optimal");
    EXPECT_EQ(j["n_params"], 2);
    EXPECT_EQ(j["C_H"].get<double>(), *r.C_H);
    EXPECT_FALSE(j.contains("message"));
}

TEST(Report, ErrorsEndUpInStatus) {
    const QuantumModel base = random_model(3, 2, 2, 19);
    const QuantumModel m = make_model(base.theta, base.rho, {base.drho[0], base.drho[0]});
    const BoundsReport r = compute_bounds(m, "degenerate");
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.status, "SingularModel");
    EXPECT_FALSE(r.C_H.has_value());
    const auto j = nlohmann::json::parse(bounds_report_json(r));
    EXPECT_TRUE(j["C_H"].is_null());
    EXPECT_TRUE(j.contains("message"));
}

TEST(Report, BuiltinDescriptorsAndParams) {
    BuiltinSpec s;
    s.kind = "magnetometry";
    s.qubits = 2;
    set_builtin_param(s, "phi", 0.5);
    EXPECT_EQ(s.phi[0], 0.5);
    EXPECT_EQ(s.phi[2], 0.5);
    set_builtin_param(s, "phi2", -1.0);
    EXPECT_EQ(s.phi[1], -1.0);
    EXPECT_NE(describe(s).find("magnetometry"), std::string::npos);
    EXPECT_EQ(kind_of([&] { set_builtin_param(s, "eta", 0.3); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(build_builtin(s).dim(), 4);

    BuiltinSpec o;
    o.input = "onephoton";
    o.photons = 1;
    o.c1sq = 1.2;
    EXPECT_EQ(kind_of([&] { build_builtin(o); }), ErrorKind::InvalidArgument);
    o.kind = "pendulum";
    EXPECT_EQ(kind_of([&] { build_builtin(o); }), ErrorKind::InvalidArgument);
}

TEST(Report, SweepParsing) {
    const SweepSpec s = parse_sweep("eta:0.1:0.9:5");
    EXPECT_EQ(s.param, "eta");
    const auto g = s.grid();
    ASSERT_EQ(g.size(), 5u);
    EXPECT_EQ(g.front(), 0.1);
    EXPECT_EQ(g.back(), 0.9);
    EXPECT_NEAR(g[2], 0.5, 1e-15);
    EXPECT_EQ(parse_sweep("gamma:0.3:0.9:1").grid(), std::vector<double>{0.3});
    for (const char* bad : {"eta:0.1:0.9", "eta:a:0.9:3", "eta:0.1:0.9:0", "eta:0.1:0.9:2.5", ":0:1:2"})
        EXPECT_EQ(kind_of([&] { parse_sweep(bad); }), ErrorKind::InvalidArgument) << bad;
}

TEST(Report, SweepRowsFollowGridForAnyJobs) {
    const SweepSpec sw = parse_sweep("eta:0.2:0.8:4");
    const auto a = run_sweep(hb(2, 0.5), sw, {}, {}, 1);
    const auto b = run_sweep(hb(2, 0.5), sw, {}, {}, 3);
    ASSERT_EQ(a.size(), 4u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].param_value, sw.grid()[i]);
        EXPECT_EQ(a[i].report.C_H, b[i].report.C_H);
    }
    const std::string csv = sweep_csv(a);
    EXPECT_EQ(csv.rfind(std::string(kSweepHeader) + "\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_EQ(kind_of([&] { run_sweep(hb(2, 0.5), parse_sweep("gamma:0:1:2"), {}); }), ErrorKind::InvalidArgument);
}

TEST(Report, FailedSweepPointsKeepTheirRow) {
    const auto rows = run_sweep(hb(2, 0.5), parse_sweep("eta:0.5:1.0:2"), {}, {}, 1);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].report.ok());
    EXPECT_EQ(rows[1].report.status, "BoundaryTransmissivity");
    std::istringstream csv(sweep_csv(rows));
    std::string line;
    std::getline(csv, line);
    std::getline(csv, line);
    std::getline(csv, line);
    EXPECT_NE(line.find("BoundaryTransmissivity"), std::string::npos);
    EXPECT_NE(line.find(",,"), std::string::npos);
}

TEST(Report, PovmChoices) {
    EXPECT_EQ(parse_povm_choice("none").kind, PovmChoice::Kind::None);
    const PovmChoice s = parse_povm_choice("sld:1");
    EXPECT_EQ(s.kind, PovmChoice::Kind::SldEigenbasis);
    EXPECT_EQ(s.parameter, 1);
    EXPECT_EQ(kind_of([] { parse_povm_choice("sld:x"); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { parse_povm_choice("/nonexistent/povm.json"); }), ErrorKind::ParseError);
    EXPECT_EQ(kind_of([] { parse_povm(R"({"elements": []})"); }), ErrorKind::ParseError);

    const std::string path =
        temp_file("qbounds_test_povm.json", R"({"elements": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]})");
    const PovmChoice e = parse_povm_choice(path);
    std::filesystem::remove(path);
    ASSERT_EQ(e.kind, PovmChoice::Kind::Explicit);
    ASSERT_EQ(e.povm.elements.size(), 2u);
    EXPECT_EQ(e.povm.elements[1](1, 1), Complex(1.0, 0.0));
}

TEST(Report, WeightFile) {
    const QuantumModel m = random_model(3, 2, 2, 3);
    const std::string good = temp_file("qbounds_test_weight.json", "[[2, 0.5], [0.5, 1]]");
    EXPECT_EQ(with_weight_file(m, good).weight(0, 1), 0.5);
    const std::string wrong = temp_file("qbounds_test_weight3.json", "[[1, 0, 0], [0, 1, 0], [0, 0, 1]]");
    EXPECT_EQ(kind_of([&] { with_weight_file(m, wrong); }), ErrorKind::DimensionMismatch);
    const std::string indefinite = temp_file("qbounds_test_weight_neg.json", "[[1, 0], [0, -1]]");
    EXPECT_EQ(kind_of([&] { with_weight_file(m, indefinite); }), ErrorKind::InvariantViolation);
    for (const auto& p : {good, wrong, indefinite}) std::filesystem::remove(p);
}
