#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "formcount/aux_count.hpp"
#include "formcount/densities.hpp"
#include "formcount/errors.hpp"
#include "formcount/io.hpp"
#include "formcount/multilinear.hpp"
#include "formcount/sigma_star.hpp"
#include "formcount/zero_count.hpp"

namespace py = pybind11;
using namespace formcount;

namespace {

// Exact values cross the boundary as "p/q" strings; the Python package turns
// them into fractions.Fraction.
std::vector<std::string> to_strings(const Vector& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(rational_string(x));
    return out;
}

Vector from_strings(const std::vector<std::string>& v) {
    Vector out;
    for (const auto& s : v) out.push_back(parse_rational(s));
    return out;
}

py::int_ to_py(const Integer& z) { return py::int_(py::str(z.get_str())); }

ExecPolicy policy(unsigned workers) { return ExecPolicy{workers, false}; }

}  // namespace

PYBIND11_MODULE(_formcount, m) {
    m.doc() = "Exact counting and density experiments for systems of forms";

    py::register_exception<GuardExceeded>(m, "GuardExceeded", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            py::set_error(PyExc_ValueError, e.what());
        }
    });

    py::class_<FormSystem>(m, "FormSystem")
        .def_static("from_json", [](const std::string& text) { return parse_form_file(text); })
        .def_static("random", &random_system, py::arg("d"), py::arg("n"), py::arg("R"), py::arg("height"),
                    py::arg("seed"))
        .def("to_json", &write_form_file)
        .def_property_readonly("n", &FormSystem::n)
        .def_property_readonly("degree", &FormSystem::degree)
        .def_property_readonly("R", &FormSystem::size)
        .def("__eq__", [](const FormSystem& a, const FormSystem& b) { return a == b; })
        .def("__repr__", [](const FormSystem& s) {
            std::string out = "FormSystem(";
            for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + to_string(s[i]);
            return out + ")";
        });

    m.def("evaluate", [](const FormSystem& s, const std::vector<std::string>& point) {
        const auto x = from_strings(point);
        Vector out;
        for (const auto& f : s.forms()) out.push_back(evaluate(f, x));
        return to_strings(out);
    });

    m.def("derivative_tensor", [](const FormSystem& s, std::size_t form) {
        py::dict out;
        const auto tensor = derivative_tensor(s.forms().at(form));
        for (const auto& [idx, v] : tensor.entries()) out[py::tuple(py::cast(idx))] = rational_string(v);
        return out;
    }, py::arg("system"), py::arg("form") = 0);

    m.def("sup_norm_fd", [](const FormSystem& s, std::size_t form) { return rational_string(sup_norm_fd(s.forms().at(form))); },
          py::arg("system"), py::arg("form") = 0);

    m.def("eval_m", [](const FormSystem& s, const std::vector<std::vector<std::string>>& slots, std::size_t form) {
        std::vector<Vector> v;
        for (const auto& slot : slots) v.push_back(from_strings(slot));
        return to_strings(eval_m(derivative_tensor(s.forms().at(form)), TuplePoint(v)));
    }, py::arg("system"), py::arg("slots"), py::arg("form") = 0);

    m.def("aux_count", [](const FormSystem& s, const std::string& B, const std::string& method, unsigned workers) {
        if (s.size() != 1) throw InputError("aux_count takes a single form");
        const auto b = parse_rational(B);
        if (method == "naive") return to_py(aux_count_naive(s[0], b, policy(workers)).count);
        if (method == "slab") return to_py(aux_count_slab(s[0], b, policy(workers)).count);
        throw InputError("method must be naive or slab");
    }, py::arg("system"), py::arg("B"), py::arg("method") = "slab", py::arg("workers") = 1);

    m.def("zero_count", [](const FormSystem& s, std::int64_t P, const std::string& box, const std::string& method,
                           unsigned workers) {
        const auto b = parse_box(box, s.n());
        if (method == "enum") return to_py(zero_count_enum(s, b, P, policy(workers)).count);
        if (method == "diagonal") return to_py(zero_count_diagonal(s, b, P, policy(workers)).count);
        if (method == "auto") {
            const std::vector<std::int64_t> Ps{P};
            return to_py(count_series(s, b, Ps, policy(workers)).front().count);
        }
        throw InputError("method must be auto, enum or diagonal");
    }, py::arg("system"), py::arg("P"), py::arg("box") = "full", py::arg("method") = "auto", py::arg("workers") = 1);

    m.def("local_count", [](const FormSystem& s, std::uint64_t p, unsigned k) {
        const auto d = local_count(s, p, k);
        return py::make_tuple(to_py(d.raw), rational_string(d.normalized));
    });

    m.def("singular_series", [](const FormSystem& s, std::uint64_t prime_bound, unsigned k_max) {
        const auto est = singular_series(s, prime_bound, k_max);
        py::list primes;
        for (const auto& pf : est.primes)
            primes.append(py::dict(py::arg("p") = pf.p, py::arg("k") = pf.k_reached,
                                   py::arg("factor") = rational_string(pf.factor), py::arg("stabilized") = pf.stabilized));
        return py::dict(py::arg("product") = rational_string(est.product), py::arg("primes") = primes);
    }, py::arg("system"), py::arg("prime_bound") = 50, py::arg("k_max") = 3);

    m.def("singular_integral", [](const FormSystem& s, const std::string& box, std::vector<double> eps,
                                  std::size_t samples, std::uint64_t seed) {
        const auto b = parse_box(box, s.n());
        if (eps.empty()) eps = default_eps_ladder(s, b, seed);
        const auto est = singular_integral(s, b, eps, samples, seed);
        return py::dict(py::arg("eps") = est.eps, py::arg("estimate") = est.estimate, py::arg("stderr") = est.stderr_,
                        py::arg("extrapolated") = est.extrapolated,
                        py::arg("extrapolated_stderr") = est.extrapolated_stderr);
    }, py::arg("system"), py::arg("box") = "full", py::arg("eps") = std::vector<double>{},
       py::arg("samples") = 100'000, py::arg("seed") = 1);

    m.def("sigma_star", [](const FormSystem& s, std::size_t budget, std::vector<std::uint64_t> primes,
                           std::uint64_t seed) {
        const auto r = u_membership(s, budget, primes, seed);
        py::object bound = r.lower_bound ? py::object(py::int_(*r.lower_bound)) : py::object(py::none());
        py::object rank = r.witness ? py::object(py::int_(r.witness->rank)) : py::object(py::none());
        py::list scans;
        for (const auto& scan : r.fp_scans)
            scans.append(py::make_tuple(scan.p, to_string(scan.status),
                                        scan.sigma ? py::object(py::int_(*scan.sigma)) : py::object(py::none())));
        return py::dict(py::arg("verdict") = to_string(r.verdict), py::arg("lower_bound") = bound,
                        py::arg("witness_rank") = rank, py::arg("fp_scans") = scans);
    }, py::arg("system"), py::arg("budget") = kDefaultSigmaBudget,
       py::arg("primes") = std::vector<std::uint64_t>{3, 5, 7}, py::arg("seed") = 1);
}
