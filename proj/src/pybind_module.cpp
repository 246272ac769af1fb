#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "modshadow/experiments.hpp"
#include "modshadow/oracle.hpp"
#include "modshadow/shadowing.hpp"

namespace py = pybind11;
using namespace modshadow;

namespace {

py::int_ to_py_int(int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v)
                              : static_cast<unsigned __int128>(v);
    py::int_ hi(static_cast<std::uint64_t>(u >> 64));
    py::int_ lo(static_cast<std::uint64_t>(u));
    py::int_ out = py::int_(py::cast<py::object>(hi).attr("__lshift__")(64))
                       .attr("__or__")(lo)
                       .cast<py::int_>();
    if (neg) out = out.attr("__neg__")().cast<py::int_>();
    return out;
}

std::string frame_repr(const FrameElement& g) {
    std::ostringstream os;
    os.precision(12);
    os << "FrameElement([[" << g.m11 << ", " << g.m12 << "], [" << g.m21 << ", " << g.m22
       << "]])";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_modshadow, m) {
    m.doc() = "Geodesic flow on the modular surface: shadowing, Bowen brackets, "
              "periodic orbits and density experiments.";

    py::class_<HalfPlanePoint>(m, "HalfPlanePoint")
        .def(py::init<double, double>(), py::arg("re"), py::arg("im"))
        .def_readwrite("re", &HalfPlanePoint::re)
        .def_readwrite("im", &HalfPlanePoint::im);

    py::class_<UnitTangent>(m, "UnitTangent")
        .def(py::init([](double re, double im, double angle) {
                 return UnitTangent{HalfPlanePoint{re, im}, angle};
             }),
             py::arg("re"), py::arg("im"), py::arg("angle"))
        .def_readwrite("base", &UnitTangent::base)
        .def_readwrite("angle", &UnitTangent::angle);

    py::class_<FrameElement>(m, "FrameElement")
        .def(py::init<double, double, double, double>(), py::arg("m11"), py::arg("m12"),
             py::arg("m21"), py::arg("m22"))
        .def(py::init<>())
        .def_readonly("m11", &FrameElement::m11)
        .def_readonly("m12", &FrameElement::m12)
        .def_readonly("m21", &FrameElement::m21)
        .def_readonly("m22", &FrameElement::m22)
        .def("entries",
             [](const FrameElement& g) {
                 auto e = g.entries();
                 return py::make_tuple(e[0], e[1], e[2], e[3]);
             })
        .def_static("identity", &FrameElement::identity)
        .def("__repr__", &frame_repr);

    py::class_<DeckElement>(m, "DeckElement")
        .def(py::init([](long long a, long long b, long long c, long long d) {
                 DeckElement g;
                 g.a = a;
                 g.b = b;
                 g.c = c;
                 g.d = d;
                 if (g.a * g.d - g.b * g.c != 1)
                     throw std::invalid_argument("DeckElement: determinant must be 1");
                 return g;
             }),
             py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"))
        .def_property_readonly("a", [](const DeckElement& g) { return to_py_int(g.a); })
        .def_property_readonly("b", [](const DeckElement& g) { return to_py_int(g.b); })
        .def_property_readonly("c", [](const DeckElement& g) { return to_py_int(g.c); })
        .def_property_readonly("d", [](const DeckElement& g) { return to_py_int(g.d); })
        .def_property_readonly("word",
                               [](const DeckElement& g) {
                                   return g.word ? py::object(py::str(*g.word))
                                                 : py::object(py::none());
                               })
        .def("trace", [](const DeckElement& g) { return to_py_int(g.trace()); })
        .def("__repr__", [](const DeckElement& g) {
            std::ostringstream os;
            os << "DeckElement(" << static_cast<long long>(g.a) << ", "
               << static_cast<long long>(g.b) << ", " << static_cast<long long>(g.c) << ", "
               << static_cast<long long>(g.d) << ")";
            return os.str();
        });

    py::enum_<ElementType>(m, "ElementType")
        .value("Identity", ElementType::Identity)
        .value("Elliptic", ElementType::Elliptic)
        .value("Parabolic", ElementType::Parabolic)
        .value("Hyperbolic", ElementType::Hyperbolic);

    // frame algebra
    m.def("compose", &compose);
    m.def("inverse", py::overload_cast<const FrameElement&>(&inverse));
    m.def("mobius_act", &mobius_act);
    m.def("frame_to_tangent", &frame_to_tangent);
    m.def("tangent_to_frame", &tangent_to_frame);
    m.def("chart_dist", &chart_dist);

    // lattice
    m.def("reduce_frame", [](const FrameElement& g) {
        ReducedFrame r = reduce_frame(g);
        return py::make_tuple(r.frame, r.deck);
    });
    m.def("reduce_point", [](const HalfPlanePoint& z) {
        auto [r, deck] = reduce_point(z);
        return py::make_tuple(r, deck);
    });
    m.def("quotient_dist", &quotient_dist);
    m.def("classify", &classify);
    m.def("translation_length", &translation_length);
    m.def("axis_frame", [](const DeckElement& g) {
        AxisFrame ax = axis_frame(g);
        return py::make_tuple(ax.frame, ax.period);
    });
    m.def("injectivity_radius", &injectivity_radius);
    m.def("compose_deck", &compose_deck);
    m.def("inverse_deck", &inverse_deck);
    m.def("deck_apply",
          [](const DeckElement& k, const FrameElement& g) { return deck_apply(k, g); });

    // flow
    m.def("geodesic_flow", &geodesic_flow);
    m.def("stable_move", &stable_move);
    m.def("unstable_move", &unstable_move);
    m.def("center_unstable_point", &center_unstable_point);
    m.def("center_stable_point", &center_stable_point);
    m.def("time_reverse", &time_reverse);

    // bracket
    py::class_<BracketParams>(m, "BracketParams")
        .def_readonly("sigma", &BracketParams::sigma)
        .def_readonly("nu", &BracketParams::nu)
        .def_readonly("c", &BracketParams::c);
    py::class_<BracketResult>(m, "BracketResult")
        .def_readonly("w", &BracketResult::w)
        .def_readonly("params", &BracketResult::params)
        .def_readonly("deck", &BracketResult::deck)
        .def_readonly("residual", &BracketResult::residual);
    m.def("nak_decompose", &nak_decompose);
    m.def("bowen_bracket", &bowen_bracket, py::arg("y"), py::arg("z"), py::arg("eta"),
          py::arg("mirrored") = false);
    m.def("bracket_in_quotient", &bracket_in_quotient, py::arg("y"), py::arg("z"),
          py::arg("eta"), py::arg("mirrored") = false);

    // shadowing
    py::class_<ShadowParameters>(m, "ShadowParameters")
        .def_readonly("epsilon", &ShadowParameters::epsilon)
        .def_readonly("delta", &ShadowParameters::delta)
        .def_readonly("eta", &ShadowParameters::eta)
        .def_readonly("t0", &ShadowParameters::t0)
        .def_readonly("K", &ShadowParameters::K)
        .def_readonly("l", &ShadowParameters::l);
    py::class_<PeriodicOrbitResult>(m, "PeriodicOrbitResult")
        .def_readonly("y", &PeriodicOrbitResult::y)
        .def_readonly("T", &PeriodicOrbitResult::T)
        .def_readonly("gamma", &PeriodicOrbitResult::gamma)
        .def_readonly("closure_residual", &PeriodicOrbitResult::closure_residual)
        .def_readonly("oracle_period", &PeriodicOrbitResult::oracle_period)
        .def_readonly("start_distance", &PeriodicOrbitResult::start_distance)
        .def_readonly("s", &PeriodicOrbitResult::s);
    py::class_<FinderBudget>(m, "FinderBudget")
        .def(py::init<>())
        .def_readwrite("t_max", &FinderBudget::t_max)
        .def_readwrite("dt", &FinderBudget::dt)
        .def_readwrite("dip_cap", &FinderBudget::dip_cap);
    m.def("p_function",
          [](double t, double t0, double lambda, const std::vector<double>& c, std::size_t mm) {
              return p_function(t, t0, lambda, c, mm);
          });
    m.def("lemma_bound_K", &lemma_bound_K);
    m.def("select_parameters", &select_parameters);
    m.def("detect_recurrence", [](const FrameElement& x0, double delta, double t_max,
                                  double dt) {
        RecurrenceHit hit = detect_recurrence(x0, delta, t_max, dt);
        return py::make_tuple(hit.t0, hit.deck, hit.dist);
    });
    m.def("find_periodic_orbit", &find_periodic_orbit, py::arg("x0"), py::arg("epsilon"),
          py::arg("budget") = FinderBudget{});

    // oracle
    py::class_<ConjClass>(m, "ConjClass")
        .def_readonly("representative", &ConjClass::representative)
        .def_readonly("trace", &ConjClass::trace)
        .def_readonly("length", &ConjClass::length)
        .def_readonly("word", &ConjClass::word);
    m.def("enumerate_classes", &enumerate_classes);
    m.def("canonical_word", &canonical_word);
    m.def("match_orbit", [](const PeriodicOrbitResult& r, const std::vector<ConjClass>& cls,
                            double tol) -> py::object {
        auto out = match_orbit(r, cls, tol);
        return out ? py::cast(*out) : py::object(py::none());
    });

    // experiments
    py::class_<Window>(m, "Window")
        .def(py::init<>())
        .def_readwrite("im_lo", &Window::im_lo)
        .def_readwrite("im_hi", &Window::im_hi)
        .def_readwrite("re_lo", &Window::re_lo)
        .def_readwrite("re_hi", &Window::re_hi)
        .def_readwrite("sample_count", &Window::sample_count);
    py::class_<DensityReport>(m, "DensityReport")
        .def_readonly("epsilon", &DensityReport::epsilon)
        .def_readonly("samples", &DensityReport::samples)
        .def_readonly("successes", &DensityReport::successes)
        .def_readonly("coverage", &DensityReport::coverage)
        .def_readonly("max_start_distance", &DensityReport::max_start_distance)
        .def_readonly("wall_seconds", &DensityReport::wall_seconds);
    m.def(
        "density_experiment",
        [](const Window& w, double eps, std::uint64_t seed, int threads) {
            ExperimentBudget budget;
            budget.seed = seed;
            budget.threads = threads;
            return density_experiment(w, eps, budget);
        },
        py::arg("window"), py::arg("epsilon"), py::arg("seed"), py::arg("threads") = 1);
    py::class_<HittingRecord>(m, "HittingRecord")
        .def_readonly("p", &HittingRecord::p)
        .def_readonly("t", &HittingRecord::t)
        .def_readonly("dist_u", &HittingRecord::dist_u)
        .def_readonly("dist_v", &HittingRecord::dist_v)
        .def_readonly("replay_ok", &HittingRecord::replay_ok);
    m.def(
        "transitivity_experiment",
        [](const FrameElement& u, const FrameElement& v, double radius) {
            return transitivity_experiment(u, v, radius);
        },
        py::arg("u_center"), py::arg("v_center"), py::arg("radius"));
}
