// Serial reference vs OpenMP kernels on the shapes a VSC fit produces.
//
//   vsc_bench [rows] [hyperplanes] [dim] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <vector>

#include "vsc/data.hpp"
#include "vsc/linalg.hpp"
#include "vsc/model.hpp"

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> t = std::chrono::steady_clock::now() - start;
    if (t.count() < best) best = t.count();
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1800;
  const std::size_t k = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 500;
  const std::size_t dim = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 20;
  const int repeats = argc > 4 ? std::atoi(argv[4]) : 3;

  vsc::Rng rng(1);
  const vsc::Dataset data = vsc::gen_twonorm(rows, dim, rng);
  vsc::Rng pair_rng(2);
  std::vector<vsc::Hyperplane> hs;
  for (const auto& p : vsc::sample_pairs(data, k, pair_rng)) hs.push_back(vsc::make_hyperplane(p));
  const vsc::VscConfig cfg;

  vsc::Matrix fs, fp;
  const double t_fs = best_of(repeats, [&] { fs = vsc::feature_matrix(hs, data.x, cfg, vsc::Exec::Serial); });
  const double t_fp = best_of(repeats, [&] { fp = vsc::feature_matrix(hs, data.x, cfg, vsc::Exec::Parallel); });

  vsc::Matrix gs, gp;
  const double t_gs = best_of(repeats, [&] { gs = vsc::gram(fs, vsc::Exec::Serial); });
  const double t_gp = best_of(repeats, [&] { gp = vsc::gram(fs, vsc::Exec::Parallel); });

  const bool same = fs == fp && gs == gp;
  std::printf("threads            : %d\n", omp_get_max_threads());
  std::printf("shape              : %zu rows, %zu hyperplanes, %zu features\n", rows, k, dim);
  std::printf("feature_matrix     : serial %.4f s, parallel %.4f s, speedup %.2fx\n", t_fs, t_fp, t_fs / t_fp);
  std::printf("gram               : serial %.4f s, parallel %.4f s, speedup %.2fx\n", t_gs, t_gp, t_gs / t_gp);
  std::printf("bitwise identical  : %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
