#pragma once

#include <string>
#include <vector>

namespace phifd {

enum class SolveMethod { Direct, Bicgstab };

inline const char* to_string(SolveMethod m) {
  return m == SolveMethod::Direct ? "direct" : "bicgstab";
}

struct SolveReport {
  std::vector<double> solution;
  /// Zero for direct solves.
  int iterations = 0;
  /// ||b - A x||_2 / ||b||_2 recomputed after the solve.
  double relative_residual = 0.0;
  double wall_time = 0.0;
  SolveMethod method = SolveMethod::Direct;
  bool converged = true;
  int restarts = 0;
};

} // namespace phifd
