#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddslab/dds.hpp"
#include "ddslab/fegroup.hpp"
#include "ddslab/residues.hpp"
#include "ddslab/xcli.hpp"

namespace py = pybind11;
using namespace ddslab;

namespace {

const quadchar::SymbolContext& qctx() {
    static quadchar::SymbolContext c = quadchar::build_context(ringarith::BaseField::rational());
    return c;
}

py::dict table_dict(const xcli::ResultTable& t) {
    py::dict d;
    d["name"] = t.name;
    d["columns"] = t.columns;
    d["rows"] = t.rows;
    py::dict meta;
    for (const auto& [k, v] : t.meta) meta[py::str(k)] = v;
    d["meta"] = meta;
    return d;
}

xcli::ExperimentConfig config_from(const std::map<std::string, std::string>& settings) {
    xcli::ExperimentConfig cfg;
    for (const auto& [k, v] : settings) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_ddslab, m) {
    m.doc() = "Double Dirichlet series experiments over Q";
    m.attr("__version__") = xcli::provenance();

    py::register_exception<Error>(m, "DdslabError", PyExc_RuntimeError);

    m.def("kronecker", &kronecker, py::arg("a"), py::arg("n"));
    m.def("chi", &quadchar::chi_int, py::arg("D"), py::arg("N"), "quadratic symbol (D / N) for odd coprime D, N");
    m.def("eta", [](u64 D, u64 N) { return quadchar::eta(qctx().class_of(D), qctx().class_of(N), qctx()); },
          py::arg("D"), py::arg("N"));
    m.def("moebius", &ringarith::moebius_u64, py::arg("n"));

    m.def("group_order", [] { return fegroup::generate_group(fegroup::phi(), fegroup::psi()).size(); });
    m.def("group_elements", [] {
        std::vector<std::string> out;
        for (const auto& g : fegroup::generate_group(fegroup::phi(), fegroup::psi())) out.push_back(g.str());
        return out;
    });
    m.def("box_covered", [](long lo, long hi, long n) {
        auto st = fegroup::continuation_pipeline();
        return fegroup::box_coverage(st.back().region, lo, hi, n).covered();
    }, py::arg("lo") = -100, py::arg("hi") = 100, py::arg("n") = 201);

    m.def("gl1_value", [](i64 d, std::complex<double> s) {
        lseries::CoeffFn a = [d](u64 n) { return cplx(d == 1 ? 1.0 : double(kronecker(d, n))); };
        return lseries::lvalue(lseries::gl1_params(d), a, s).L;
    }, py::arg("d"), py::arg("s"));

    m.def("rr_from_coefficient", [](double a, u64 r, double s, int eta) {
        return residues::Rr_from_pair(residues::local_pair_from_coefficient(a, r, s), eta).value;
    }, py::arg("a"), py::arg("r"), py::arg("s") = 0.5, py::arg("eta") = 1);
    m.def("rr_monotone", [](u64 r, double s) { return residues::rr_monotone_scan(r, s, -2.0, 2.0, 0.01).strictly_monotone; },
          py::arg("r"), py::arg("s") = 0.5);

    m.def("z_pure", [](std::complex<double> s, std::complex<double> w, u64 X, bool n_first) {
        auto sys = lseries::sym2_delta(std::max<u64>(X, 3) + 100);
        dds::TruncationSpec t;
        t.X_D = t.X_N = X;
        if (n_first) t.order = dds::Order::NFirst;
        return dds::Z_pure(s, w, sys, qctx(), t).value;
    }, py::arg("s"), py::arg("w"), py::arg("X"), py::arg("n_first") = false);

    m.def("exp_meansquare", [](const std::map<std::string, std::string>& settings) {
        return table_dict(xcli::exp_meansquare(config_from(settings)));
    }, py::arg("settings") = std::map<std::string, std::string>{});
    m.def("exp_nonvanishing", [](const std::map<std::string, std::string>& settings) {
        return table_dict(xcli::exp_nonvanishing(config_from(settings), qctx()));
    }, py::arg("settings") = std::map<std::string, std::string>{});

    m.def("criterion_count", &xcli::criterion_count);
    m.def("run_criterion", [](int id) {
        py::gil_scoped_release release;
        auto r = xcli::run_criterion(id, xcli::ExperimentConfig{});
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["id"] = r.id;
        d["name"] = r.name;
        d["pass"] = r.pass;
        d["seconds"] = r.seconds;
        d["detail"] = r.detail;
        return d;
    }, py::arg("id"));

    m.def("cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "xcli");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        std::ostringstream out, err;
        int code = xcli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "run the command line in-process; returns (exit code, stdout, stderr)");
}
