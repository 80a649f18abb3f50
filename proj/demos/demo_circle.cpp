// Disc problem with the three schemes at a few resolutions, printed side by side.
// Writes the N=40 penalised solution to circle40.vtk / circle40.csv.

#include <cstdio>

#include "phifd/analysis.hpp"
#include "phifd/assembly.hpp"
#include "phifd/direct.hpp"
#include "phifd/io.hpp"

int main() {
  const phifd::TestCase tc = phifd::builtin_case("circle2d", 2);
  const phifd::Scheme schemes[] = {phifd::Scheme::PhiFD, phifd::Scheme::PhiFD2,
                                   phifd::Scheme::ShortleyWeller};
  std::printf("%-16s %5s %12s %12s %12s\n", "scheme", "N", "L2", "Linf", "H1");
  for (auto s : schemes) {
    for (int n : {10, 20, 40, 80}) {
      const auto sys = phifd::assemble(tc, n, phifd::default_params(s));
      const auto rep = phifd::direct_solve(sys.matrix, sys.rhs);
      const auto e = phifd::relative_errors(rep.solution, tc, sys.classification);
      std::printf("%-16s %5d %12.4e %12.4e %12.4e\n", phifd::to_string(s), n, e.l2, e.linf, e.h1);
      if (s == phifd::Scheme::PhiFD && n == 40)
        phifd::export_field(rep.solution, sys.grid(), "circle40");
    }
  }
  return 0;
}
