#pragma once

/// \file
/// CSV export. Every file starts with a '#' line naming the format and its
/// version, followed by a column header.

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "laxol/boundary_table.hpp"
#include "laxol/characteristics.hpp"
#include "laxol/oracle.hpp"
#include "laxol/solver.hpp"

namespace laxol {

inline constexpr int kCsvVersion = 1;

namespace detail {

inline void csv_header(std::ostream& os, const char* kind,
                       const char* columns) {
  os << "# laxol " << kind << " v" << kCsvVersion << '\n' << columns << '\n';
  os << std::setprecision(12);
}

}  // namespace detail

inline void write_field_csv(std::ostream& os, const SolutionField& field) {
  detail::csv_header(os, "field",
                     "x,t,u,W,branch,y_lo,y_hi,tau_lo,tau_hi,ok");
  for (const auto& row : field.samples) {
    for (const auto& s : row) {
      os << s.x << ',' << s.t << ',' << s.u << ',' << s.W << ','
         << branch_name(s.branch) << ',' << s.y_lo << ',' << s.y_hi << ','
         << s.tau_lo << ',' << s.tau_hi << ',' << (s.ok ? 1 : 0) << '\n';
    }
  }
}

inline void write_jumps_csv(std::ostream& os, const SolutionField& field) {
  detail::csv_header(os, "jumps", "t,x_jump,u_left,u_right");
  for (const auto& row : field.jumps) {
    for (const auto& j : row) {
      os << j.t << ',' << j.x << ',' << j.u_left << ',' << j.u_right << '\n';
    }
  }
}

inline void write_table_csv(std::ostream& os, const BoundaryTable& tab) {
  detail::csv_header(os, "boundary-table", "t,W,mechanism,from_index,ub_bar");
  os << std::setprecision(18);
  for (std::size_t k = 0; k < tab.size(); ++k) {
    os << tab.t[k] << ',' << tab.W[k] << ',' << mechanism_name(tab.mechanism[k])
       << ',' << tab.from[k] << ',' << tab.ub_bar[k] << '\n';
  }
}

inline void write_curve_csv(std::ostream& os, const CharacteristicCurve& c) {
  detail::csv_header(os, "curve", "t,x,speed,shock");
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    os << c.t[k] << ',' << c.x[k] << ',' << c.speed[k] << ','
       << (c.shock[k] ? 1 : 0) << '\n';
  }
}

inline void write_triangles_csv(std::ostream& os,
                                const std::vector<CharTriangle>& tris) {
  detail::csv_header(os, "triangles", "apex_x,apex_t,case,theta,left,right");
  for (const auto& tr : tris) {
    for (std::size_t k = 0; k < tr.theta.size(); ++k) {
      os << tr.x << ',' << tr.t << ',' << triangle_case_name(tr.kind) << ','
         << tr.theta[k] << ',' << tr.left[k] << ',' << tr.right[k] << '\n';
    }
  }
}

inline void write_oracle_csv(std::ostream& os, const OracleField& field) {
  detail::csv_header(os, "oracle", "t,x,u");
  for (std::size_t j = 0; j < field.ts.size(); ++j) {
    for (std::size_t i = 0; i < field.xs.size(); ++i) {
      os << field.ts[j] << ',' << field.xs[i] << ',' << field.u[j][i] << '\n';
    }
  }
}

}  // namespace laxol
