#include "blens/geometry.hpp"

#include <stdexcept>

namespace blens {

std::string polygon_name(Polygon p) {
    switch (p) {
        case Polygon::Square: return "square";
        case Polygon::Rectangle: return "rectangle";
        case Polygon::IsoTriangle: return "iso";
        case Polygon::EquiTriangle: return "equi";
        case Polygon::HemiTriangle: return "hemi";
    }
    throw std::invalid_argument("unknown polygon");
}

Polygon polygon_from_name(const std::string& s) {
    if (s == "square") return Polygon::Square;
    if (s == "rectangle") return Polygon::Rectangle;
    if (s == "iso") return Polygon::IsoTriangle;
    if (s == "equi") return Polygon::EquiTriangle;
    if (s == "hemi") return Polygon::HemiTriangle;
    throw std::invalid_argument("unknown polygon name: " + s);
}

std::string bc_name(BC bc) {
    switch (bc) {
        case BC::Dirichlet: return "dirichlet";
        case BC::Neumann: return "neumann";
        case BC::Robin: return "robin";
    }
    throw std::invalid_argument("unknown boundary condition");
}

BC bc_from_name(const std::string& s) {
    if (s == "dirichlet") return BC::Dirichlet;
    if (s == "neumann") return BC::Neumann;
    if (s == "robin") return BC::Robin;
    throw std::invalid_argument("unknown boundary condition name: " + s);
}

}  // namespace blens
