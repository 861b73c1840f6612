#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "cvarkit/solver.hpp"

namespace cvarkit {

namespace {

std::string var_name(const LinearProgram& p, Eigen::Index j) {
    if (!p.names.empty()) return p.names[static_cast<std::size_t>(j)];
    return fmt::format("x{}", j);
}

void write_row(std::ostream& os, const LinearProgram& p, const Eigen::VectorXd& row) {
    bool first = true;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        double v = row[j];
        if (v == 0.0) continue;
        if (first) {
            os << (v < 0 ? "- " : "");
        } else {
            os << (v < 0 ? " - " : " + ");
        }
        double a = std::fabs(v);
        if (a != 1.0) os << fmt::format("{} ", a);
        os << var_name(p, j);
        first = false;
    }
    if (first) os << "0 " << var_name(p, 0);
}

}  // namespace

void write_lp(std::ostream& os, const LinearProgram& p) {
    p.validate();
    os << "\\ generated by cvarkit\n";
    os << "Minimize\n obj: ";
    write_row(os, p, p.objective);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const Constraint& c = p.constraints[i];
        os << fmt::format(" c{}: ", i);
        write_row(os, p, c.row);
        const char* rel = c.rel == Relation::le ? "<=" : c.rel == Relation::ge ? ">=" : "=";
        os << fmt::format(" {} {}\n", rel, c.rhs);
    }
    os << "Bounds\n";
    for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
        double l = p.lower[j], u = p.upper[j];
        std::string name = var_name(p, j);
        if (std::isinf(l) && std::isinf(u)) {
            os << fmt::format(" {} free\n", name);
        } else if (std::isinf(u)) {
            if (l != 0.0) os << fmt::format(" {} >= {}\n", name, l);
        } else if (std::isinf(l)) {
            os << fmt::format(" -inf <= {} <= {}\n", name, u);
        } else {
            os << fmt::format(" {} <= {} <= {}\n", l, name, u);
        }
    }
    os << "End\n";
}

}  // namespace cvarkit
